// Exact time representation: integer ticks of 0.1 ms.
#ifndef TURNKIT_TIME_H_
#define TURNKIT_TIME_H_

#include <compare>
#include <cstdint>
#include <string>

namespace turnkit {

inline constexpr std::int64_t kTicksPerSecond = 10000;

// A point in time or a duration. Arithmetic is exact; floating point only
// appears when converting to and from seconds at I/O boundaries.
class Time {
 public:
  constexpr Time() = default;

  static constexpr Time FromTicks(std::int64_t ticks) { return Time(ticks); }
  // Rounds to the nearest tick. Throws InputError on non-finite input.
  static Time FromSeconds(double seconds);

  constexpr std::int64_t ticks() const { return ticks_; }
  constexpr double seconds() const {
    return static_cast<double>(ticks_) / kTicksPerSecond;
  }

  constexpr auto operator<=>(const Time &) const = default;

  constexpr Time operator+(Time o) const { return Time(ticks_ + o.ticks_); }
  constexpr Time operator-(Time o) const { return Time(ticks_ - o.ticks_); }
  constexpr Time operator*(std::int64_t k) const { return Time(ticks_ * k); }
  constexpr Time &operator+=(Time o) {
    ticks_ += o.ticks_;
    return *this;
  }
  constexpr Time &operator-=(Time o) {
    ticks_ -= o.ticks_;
    return *this;
  }

 private:
  constexpr explicit Time(std::int64_t ticks) : ticks_(ticks) {}
  std::int64_t ticks_ = 0;
};

inline Time Seconds(double s) { return Time::FromSeconds(s); }

// Fixed-point rendering with the given number of decimals (at most 4),
// rounding half away from zero. Exact: no floating point is involved.
std::string FormatSeconds(Time t, int decimals);

}  // namespace turnkit

#endif  // TURNKIT_TIME_H_
