#pragma once

#include "schedpred/domain.hpp"

#include <iosfwd>
#include <string>

namespace schedpred {

/// Line-oriented instance format:
///
///     # alpha=2/5 w0=20/1 w1=1/1 rho=1/10 eps0=1/10 eps1=1/10 mode=binary
///     # id,true_type,prediction,release_time
///     1,0,0,0/1
///
/// The first comment carries the parameters as exact fractions (rho/eps
/// may be omitted in probabilistic mode). Predictions are 0/1 labels in
/// binary mode and fractions in probabilistic mode.
void write_instance(std::ostream& os, const Instance& instance);

/// Throws InvalidInstance with the offending line number on malformed input.
[[nodiscard]] Instance read_instance(std::istream& is);

[[nodiscard]] std::string to_text(const Instance& instance);
[[nodiscard]] Instance from_text(const std::string& text);

}  // namespace schedpred
