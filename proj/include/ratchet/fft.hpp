#pragma once

// Thin FFTW wrapper: aligned storage plus a process-wide, thread-safe plan
// cache for the per-axis and two-axis transforms used by the propagator.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <new>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace ratchet::fft {

template <class T>
struct FftwAllocator {
  using value_type = T;

  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    void* p = fftw_malloc(n * sizeof(T));
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }

  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept {
    return true;
  }
};

using Complex = std::complex<double>;
using ComplexBuffer = std::vector<Complex, FftwAllocator<Complex>>;

// estimate: deterministic plan choice, slower execution.
// measure: timed plan choice; pair with wisdom files to make reruns repeat
// the same plan (and hence the same rounding).
enum class Planning { estimate, measure };

// Which axes of a row-major n1 x n2 grid are transformed.
enum class Axes { first, second, both };

// to_position evaluates sum_m c(m) e^{+i m q_j}; to_momentum the conjugate
// kernel. Neither is normalized.
enum class Direction { to_position, to_momentum };

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  void set_planning(Planning p) {
    std::lock_guard lock(mutex_);
    planning_ = p;
  }

  Planning planning() const {
    std::lock_guard lock(mutex_);
    return planning_;
  }

  bool import_wisdom(const std::string& path) {
    std::lock_guard lock(mutex_);
    return fftw_import_wisdom_from_filename(path.c_str()) != 0;
  }

  bool export_wisdom(const std::string& path) const {
    std::lock_guard lock(mutex_);
    return fftw_export_wisdom_to_filename(path.c_str()) != 0;
  }

  // In-place unnormalized transform of `data` (n1*n2 entries, allocated with
  // FftwAllocator).
  void execute(Axes axes, Direction dir, std::size_t n1, std::size_t n2,
               Complex* data) {
    fftw_plan plan = plan_for(axes, dir, n1, n2);
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, p, p);
  }

 private:
  PlanCache() = default;

  using Key = std::tuple<int, int, std::size_t, std::size_t, int>;

  fftw_plan plan_for(Axes axes, Direction dir, std::size_t n1,
                     std::size_t n2) {
    std::lock_guard lock(mutex_);
    Key key{static_cast<int>(axes), static_cast<int>(dir), n1, n2,
            static_cast<int>(planning_)};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const int sign = dir == Direction::to_position ? FFTW_BACKWARD
                                                   : FFTW_FORWARD;
    const unsigned flags =
        planning_ == Planning::measure ? FFTW_MEASURE : FFTW_ESTIMATE;
    ComplexBuffer scratch(n1 * n2);
    auto* s = reinterpret_cast<fftw_complex*>(scratch.data());
    const int r = static_cast<int>(n1);
    const int c = static_cast<int>(n2);

    fftw_plan plan = nullptr;
    switch (axes) {
      case Axes::both:
        plan = fftw_plan_dft_2d(r, c, s, s, sign, flags);
        break;
      case Axes::second: {
        int n[1] = {c};
        plan = fftw_plan_many_dft(1, n, r, s, nullptr, 1, c, s, nullptr, 1, c,
                                  sign, flags);
        break;
      }
      case Axes::first: {
        int n[1] = {r};
        plan = fftw_plan_many_dft(1, n, c, s, nullptr, c, 1, s, nullptr, c, 1,
                                  sign, flags);
        break;
      }
    }
    if (plan == nullptr) throw std::runtime_error("fftw planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

  mutable std::mutex mutex_;
  Planning planning_ = Planning::estimate;
  std::map<Key, fftw_plan> plans_;
};

}  // namespace ratchet::fft
