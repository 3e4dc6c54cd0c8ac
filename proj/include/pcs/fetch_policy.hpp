#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <random>

namespace pcs {

struct FetchPolicy {
  int per_page = 10000;
  std::optional<int> max_pages;  // nullopt: until the provider is exhausted
  int max_concurrent_requests = 4;
  int max_attempts = 5;
  std::chrono::milliseconds backoff_base{500};
  double rate_limit = 0.75;  // requests per second
  std::chrono::seconds timeout{60};
  std::uint64_t jitter_seed = 0x5eed;

  // Throws Error{bounds} when a count is not positive or attempts exceed 10.
  void validate() const;
};

inline constexpr int kMaxRetryAttempts = 10;

class Clock {
 public:
  using time_point = std::chrono::steady_clock::time_point;
  using duration = std::chrono::steady_clock::duration;

  virtual ~Clock() = default;
  virtual time_point now() = 0;
  virtual void sleep_for(duration d) = 0;
};

class SystemClock final : public Clock {
 public:
  time_point now() override;
  void sleep_for(duration d) override;
};

// Time only moves when somebody sleeps. Thread safe.
class SimulatedClock final : public Clock {
 public:
  time_point now() override;
  void sleep_for(duration d) override;
  duration slept() const;

 private:
  mutable std::mutex mutex_;
  duration elapsed_{};
};

// Sliding-window limiter: at most `per_second` acquisitions in any window of
// one second (one per 1/rate seconds when rate < 1).
class RateLimiter {
 public:
  RateLimiter(double per_second, Clock& clock);
  void acquire();

 private:
  Clock& clock_;
  std::size_t capacity_;
  Clock::duration window_;
  std::mutex mutex_;
  std::deque<Clock::time_point> issued_;
};

// Exponential backoff with uniform jitter in [0, base): delay before retry
// number `attempt` (1-based) is base * 2^(attempt-1) + jitter.
class Backoff {
 public:
  Backoff(std::chrono::milliseconds base, std::uint64_t seed) : base_(base), rng_(seed) {}
  std::chrono::milliseconds delay(int attempt);

 private:
  std::chrono::milliseconds base_;
  std::mutex mutex_;
  std::mt19937_64 rng_;
};

}  // namespace pcs
