#include "pcs/fetch_policy.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "pcs/errors.hpp"

namespace pcs {

void FetchPolicy::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::bounds, std::string("fetch policy: ") + what);
  };
  require(per_page > 0, "per_page must be positive");
  require(!max_pages || *max_pages > 0, "max_pages must be positive");
  require(max_concurrent_requests > 0, "max_concurrent_requests must be positive");
  require(max_attempts > 0 && max_attempts <= kMaxRetryAttempts, "retry attempts must be in [1, 10]");
  require(rate_limit > 0.0, "rate_limit must be positive");
  require(timeout.count() > 0, "timeout must be positive");
  require(backoff_base.count() >= 0, "backoff must not be negative");
}

Clock::time_point SystemClock::now() { return std::chrono::steady_clock::now(); }
void SystemClock::sleep_for(duration d) { std::this_thread::sleep_for(d); }

Clock::time_point SimulatedClock::now() {
  std::lock_guard lock(mutex_);
  return time_point{} + elapsed_;
}

void SimulatedClock::sleep_for(duration d) {
  std::lock_guard lock(mutex_);
  if (d > duration::zero()) elapsed_ += d;
}

Clock::duration SimulatedClock::slept() const {
  std::lock_guard lock(mutex_);
  return elapsed_;
}

RateLimiter::RateLimiter(double per_second, Clock& clock) : clock_(clock) {
  using namespace std::chrono;
  if (!(per_second > 0.0)) throw Error(ErrorCode::bounds, "rate limit must be positive");
  if (per_second >= 1.0) {
    capacity_ = static_cast<std::size_t>(std::floor(per_second));
    window_ = duration_cast<Clock::duration>(seconds(1));
  } else {
    capacity_ = 1;
    window_ = duration_cast<Clock::duration>(duration<double>(1.0 / per_second));
  }
}

void RateLimiter::acquire() {
  std::lock_guard lock(mutex_);
  for (;;) {
    const auto now = clock_.now();
    while (!issued_.empty() && issued_.front() + window_ <= now) issued_.pop_front();
    if (issued_.size() < capacity_) {
      issued_.push_back(now);
      return;
    }
    clock_.sleep_for(issued_.front() + window_ - now);
  }
}

std::chrono::milliseconds Backoff::delay(int attempt) {
  const auto exponent = std::clamp(attempt - 1, 0, 20);
  const auto scaled = base_ * (std::int64_t{1} << exponent);
  std::chrono::milliseconds jitter{0};
  if (base_.count() > 0) {
    std::lock_guard lock(mutex_);
    std::uniform_int_distribution<std::int64_t> dist(0, base_.count() - 1);
    jitter = std::chrono::milliseconds(dist(rng_));
  }
  return scaled + jitter;
}

}  // namespace pcs
