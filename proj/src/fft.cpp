#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

namespace lzs::detail {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> allocate(std::size_t n) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {}
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace

std::size_t good_fft_length(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t length) {
  const std::size_t bins = length / 2 + 1;
  auto in = allocate<double>(length);
  auto out = allocate<fftw_complex>(bins);
  std::fill(in.get(), in.get() + length, 0.0);
  std::copy_n(x.begin(), std::min(x.size(), length), in.get());

  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(fftw_plan_dft_r2c_1d(static_cast<int>(length), in.get(),
                                                        out.get(), FFTW_ESTIMATE));
  }
  plan->execute();

  std::vector<std::complex<double>> result(bins);
  for (std::size_t j = 0; j < bins; ++j) result[j] = {out[j][0], out[j][1]};
  return result;
}

std::vector<double> irfft(std::span<const std::complex<double>> spectrum, std::size_t length) {
  const std::size_t bins = length / 2 + 1;
  auto in = allocate<fftw_complex>(bins);
  auto out = allocate<double>(length);
  for (std::size_t j = 0; j < bins; ++j) {
    const auto v = j < spectrum.size() ? spectrum[j] : std::complex<double>{};
    in[j][0] = v.real();
    in[j][1] = v.imag();
  }

  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    // c2r destroys its input; `in` is scratch here.
    plan = std::make_unique<Plan>(fftw_plan_dft_c2r_1d(static_cast<int>(length), in.get(),
                                                        out.get(), FFTW_ESTIMATE));
  }
  plan->execute();

  std::vector<double> result(out.get(), out.get() + length);
  const double norm = 1.0 / static_cast<double>(length);
  for (auto& v : result) v *= norm;
  return result;
}

}  // namespace lzs::detail
