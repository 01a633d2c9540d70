#pragma once

#include <string>
#include <string_view>

#include "reach/pomdp.hpp"

namespace reach {

/// Parses the line-oriented model format:
///
///   # comment
///   states 3
///   actions 2
///   observations 2
///   label state 0 start
///   start: 0:0.5 1:0.5
///   target: 2
///   T: a s s' p
///   Z: a s' o p
///
/// The three count lines come first. Repeated T/Z entries accumulate.
/// Throws SyntaxError with a 1-based line and column, or ValidationError
/// naming the first row that does not sum to one.
Pomdp parse_model(std::string_view text);
Pomdp load_model(const std::string& path);

/// Inverse of parse_model; probabilities are written with 17 significant
/// digits so the round trip is exact.
std::string serialize_model(const Pomdp& p);
void save_model(const Pomdp& p, const std::string& path);

}  // namespace reach
