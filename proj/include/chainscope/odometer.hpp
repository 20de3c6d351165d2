#pragma once

// Adding machines: mixed-radix digit sequences with carry addition, stored to
// a finite depth. Digit x1 is the least significant ("leftmost-least").

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace chainscope {

using DigitString = std::vector<std::uint32_t>;

class Odometer {
 public:
  /// `alpha` gives j_1, j_2, ...; if it is shorter than `depth`, the missing
  /// radices are filled with `tail`. Every radix must be >= 2.
  Odometer(std::vector<std::uint32_t> alpha, std::size_t depth, std::optional<std::uint32_t> tail = {});

  std::size_t depth() const { return alpha_.size(); }
  const std::vector<std::uint32_t>& alpha() const { return alpha_; }
  std::optional<std::uint32_t> tail() const { return tail_; }

  /// j_1 * ... * j_D, saturating at SIZE_MAX.
  std::size_t size() const { return size_; }

  bool valid(const DigitString& x) const;
  DigitString zero() const { return DigitString(depth(), 0); }
  DigitString one() const;

  /// Little-endian mixed-radix index of a digit string and back.
  std::size_t index_of(const DigitString& x) const;
  DigitString digits_of(std::size_t index) const;

 private:
  std::vector<std::uint32_t> alpha_;
  std::optional<std::uint32_t> tail_;
  std::size_t size_ = 1;
};

/// sum_i [x_i != y_i] / 2^i over the stored depth. The omitted tail of the
/// infinite sum is at most 2^-D.
double d_alpha(const Odometer& o, const DigitString& x, const DigitString& y);

/// Digit-wise addition with carry; a carry out of the last stored digit is dropped.
DigitString add(const Odometer& o, const DigitString& x, const DigitString& y);

/// The adding machine map x -> x + (1,0,0,...).
DigitString g_alpha(const Odometer& o, const DigitString& x);

std::string format_digits(const DigitString& x);
DigitString parse_digits(const std::string& text);

}  // namespace chainscope
