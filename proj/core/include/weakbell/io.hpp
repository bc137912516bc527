// Copyright 2026 The weakbell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * CSV and JSON serialization.
 *
 * Numbers print with 17 significant digits. Values below the double range
 * are printed from their logarithms as mantissa and decimal exponent, and
 * a quantity within 1e-12 of 2 is printed as an exact decimal expansion so
 * that "above 2" survives the trip through text.
 */

#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "weakbell/bell.hpp"
#include "weakbell/montecarlo.hpp"
#include "weakbell/pointer.hpp"
#include "weakbell/protocol.hpp"

namespace weakbell {

/// %.17g, with "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double value);
/// `value`, or exp(log_value) in mantissa-exponent form when value is zero
/// or subnormal. Only for non-negative quantities.
std::string format_from_log(double value, double log_value);
/// 2 + sign * exp(log_abs_excess), exact to 10 significant digits of the
/// excess.
std::string format_two_plus(int sign, double log_abs_excess);

void write_tradeoff_csv(std::ostream &os, std::span<const TradeoffRow> rows);
void write_pointer_csv(std::ostream &os, const PointerState &p);
void write_double_violation_csv(std::ostream &os,
                                std::span<const DoubleViolationRow> rows);
void write_positivity_csv(std::ostream &os, const PositivityReport &report);
void write_protocol_csv(std::ostream &os, const ProtocolSchedule &schedule);

/// {dim, weight, entries: row-major [re, im] pairs}.
nlohmann::json to_json(const DensityOperator &rho);
/// Inverse of to_json; validates like DensityOperator::unnormalized.
DensityOperator density_from_json(const nlohmann::json &j);

/// Canonical description of a chain (keys sorted, pointers by label and
/// FNV-1a hash of their samples).
nlohmann::json to_json(const BellChainConfig &cfg);
/// 16 lower-case hex digits of FNV-1a 64 over the canonical JSON text.
std::string config_digest(const BellChainConfig &cfg);
std::uint64_t fnv1a64(std::string_view bytes);

nlohmann::json to_json(const ChiSquareReport &report);
nlohmann::json to_json(const EmpiricalReport &report,
                       const ChiSquareReport &chi_square);

nlohmann::json to_json(const TripleScanReport &report);

} // namespace weakbell
