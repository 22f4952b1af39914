#pragma once

#include "reflectlab/stopping.hpp"

#include <string_view>

namespace reflectlab {

/// Parses the rule grammar produced by StoppingRule::describe():
///
///   rule  := fixed(num) | hit(q) | Tpm(q,q) | tau(q,q,int)
///          | min(rule,rule) | max(rule,rule) | compose(rule,rule)
///          | mix(event?rule: ... :rule)
///   event := le(rule,rule) | pos(rule) | neg(rule) | seen(rule)
///
/// `q` is an exact rational p/q or an integer when written so, otherwise a
/// decimal. Throws std::invalid_argument with the offending position.
StoppingRule parse_rule(std::string_view text);
PrefixEvent parse_event(std::string_view text);

}  // namespace reflectlab
