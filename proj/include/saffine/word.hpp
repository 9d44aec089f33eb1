#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "saffine/error.hpp"

namespace saffine {

/// Digit of an address; the numeric value is the enumerator (m = -1, p = +1).
enum class Digit : std::int8_t { m = -1, p = 1 };

constexpr int value(Digit d) { return static_cast<int>(d); }
constexpr Digit flip(Digit d) { return d == Digit::m ? Digit::p : Digit::m; }
constexpr char to_char(Digit d) { return d == Digit::m ? 'm' : 'p'; }
constexpr Digit digit_from_sign(double s) { return s < 0.0 ? Digit::m : Digit::p; }

/// Finite word over {m, p}.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Digit> digits) : digits_(std::move(digits)) {}
  Word(std::size_t n, Digit d) : digits_(n, d) {}

  static Word parse(std::string_view s) {
    std::vector<Digit> out;
    out.reserve(s.size());
    for (char ch : s) {
      if (ch == 'm' || ch == '-' || ch == '0') {
        out.push_back(Digit::m);
      } else if (ch == 'p' || ch == '+' || ch == '1') {
        out.push_back(Digit::p);
      } else {
        throw Error(ErrorKind::Parse, "invalid digit '" + std::string(1, ch) + "' in word");
      }
    }
    return Word(std::move(out));
  }

  std::size_t size() const { return digits_.size(); }
  bool empty() const { return digits_.empty(); }
  Digit operator[](std::size_t i) const { return digits_[i]; }
  int value_at(std::size_t i) const { return value(digits_[i]); }
  const std::vector<Digit>& digits() const { return digits_; }
  auto begin() const { return digits_.begin(); }
  auto end() const { return digits_.end(); }

  void push_back(Digit d) { digits_.push_back(d); }
  void pop_back() { digits_.pop_back(); }

  Word reversed() const { return Word(std::vector<Digit>(digits_.rbegin(), digits_.rend())); }

  std::string str() const {
    std::string s;
    s.reserve(digits_.size());
    for (Digit d : digits_) s.push_back(to_char(d));
    return s;
  }

  Word flipped() const {
    Word w = *this;
    for (auto& d : w.digits_) d = flip(d);
    return w;
  }

  /// Word obtained by negating every odd-indexed digit.
  Word alternated() const {
    Word w = *this;
    for (std::size_t i = 1; i < w.digits_.size(); i += 2) w.digits_[i] = flip(w.digits_[i]);
    return w;
  }

  Word substr(std::size_t pos, std::size_t len = std::string::npos) const {
    if (pos > digits_.size()) pos = digits_.size();
    const std::size_t end = len == std::string::npos ? digits_.size() : std::min(digits_.size(), pos + len);
    return Word(std::vector<Digit>(digits_.begin() + static_cast<std::ptrdiff_t>(pos),
                                   digits_.begin() + static_cast<std::ptrdiff_t>(end)));
  }

  bool starts_with(const Word& prefix) const {
    if (prefix.size() > size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
      if (digits_[i] != prefix.digits_[i]) return false;
    return true;
  }

  Word& operator+=(const Word& o) {
    digits_.insert(digits_.end(), o.digits_.begin(), o.digits_.end());
    return *this;
  }
  friend Word operator+(Word a, const Word& b) { return a += b; }
  friend Word operator+(Word a, Digit d) { a.push_back(d); return a; }
  friend Word operator+(Digit d, const Word& b) { return Word(1, d) + b; }
  bool operator==(const Word&) const = default;
  auto operator<=>(const Word& o) const { return digits_ <=> o.digits_; }

 private:
  std::vector<Digit> digits_;
};

inline Word repeat(const Word& w, std::size_t times) {
  Word out;
  for (std::size_t i = 0; i < times; ++i) out += w;
  return out;
}

inline Word power(Digit d, std::size_t times) { return Word(times, d); }

/// Eventually periodic infinite address: preperiod followed by period repeated forever.
struct EventualAddress {
  Word preperiod;
  Word period;

  EventualAddress() : period(1, Digit::p) {}
  EventualAddress(Word pre, Word per) : preperiod(std::move(pre)), period(std::move(per)) {
    if (period.empty()) throw Error(ErrorKind::InvalidArgument, "period of an eventual address must be nonempty");
  }

  static EventualAddress parse(std::string_view pre, std::string_view per) {
    return {Word::parse(pre), Word::parse(per)};
  }

  Digit at(std::size_t i) const {
    if (i < preperiod.size()) return preperiod[i];
    return period[(i - preperiod.size()) % period.size()];
  }

  /// First n digits.
  Word prefix(std::size_t n) const {
    Word w;
    for (std::size_t i = 0; i < n; ++i) w.push_back(at(i));
    return w;
  }

  EventualAddress flipped() const { return {preperiod.flipped(), period.flipped()}; }

  /// Subsequence (a_{offset + stride*j})_j, again eventually periodic.
  EventualAddress decimate(std::size_t stride, std::size_t offset) const;

  std::string str() const { return preperiod.str() + "(" + period.str() + ")^inf"; }

  bool operator==(const EventualAddress&) const = default;
};

inline EventualAddress EventualAddress::decimate(std::size_t stride, std::size_t offset) const {
  if (stride == 0) throw Error(ErrorKind::InvalidArgument, "stride must be positive");
  const std::size_t q = period.size();
  std::size_t g = stride, r = q;
  while (r != 0) { const std::size_t t = g % r; g = r; r = t; }
  const std::size_t new_q = q / g;  // lcm(q, stride) / stride
  const std::size_t start = preperiod.size() > offset ? preperiod.size() - offset : 0;
  const std::size_t new_p = (start + stride - 1) / stride;
  Word pre, per;
  for (std::size_t j = 0; j < new_p; ++j) pre.push_back(at(offset + stride * j));
  for (std::size_t j = 0; j < new_q; ++j) per.push_back(at(offset + stride * (new_p + j)));
  return {pre, per};
}

}  // namespace saffine
