#include "qchaos/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace qchaos {

namespace detail {
void* aligned_alloc_bytes(std::size_t bytes) { return fftw_malloc(bytes == 0 ? 1 : bytes); }
void aligned_free_bytes(void* p) noexcept { fftw_free(p); }
}  // namespace detail

namespace fft {
namespace {

enum class Kind { C2C1d, C2C2d, R2CAxis, C2RAxis };

using Key = std::tuple<Kind, int, std::size_t, std::size_t, std::size_t>;

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(const Key& key) {
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    fftw_plan plan = make(key);
    if (!plan) throw std::runtime_error("fft: plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  // ESTIMATE planning keeps the chosen algorithm independent of timing, which
  // keeps repeated runs bitwise identical.
  static constexpr unsigned kFlags = FFTW_ESTIMATE;

  static fftw_plan make(const Key& key) {
    const auto [kind, sign, a, b, c] = key;
    switch (kind) {
      case Kind::C2C1d: {
        AlignedVector<cplx> buf(a * b);
        const int n = static_cast<int>(a);
        return fftw_plan_many_dft(1, &n, static_cast<int>(b),
                                  reinterpret_cast<fftw_complex*>(buf.data()), nullptr, 1, n,
                                  reinterpret_cast<fftw_complex*>(buf.data()), nullptr, 1, n,
                                  sign, kFlags);
      }
      case Kind::C2C2d: {
        AlignedVector<cplx> buf(a * b);
        return fftw_plan_dft_2d(static_cast<int>(a), static_cast<int>(b),
                                reinterpret_cast<fftw_complex*>(buf.data()),
                                reinterpret_cast<fftw_complex*>(buf.data()), sign, kFlags);
      }
      case Kind::R2CAxis:
      case Kind::C2RAxis: {
        const std::size_t rows = a, cols = b;
        const int axis = static_cast<int>(c);
        const std::size_t n = axis == 1 ? cols : rows;
        const std::size_t nh = n / 2 + 1;
        const std::size_t other = axis == 1 ? rows : cols;
        const int len = static_cast<int>(n);
        // Axis 1: rows are contiguous signals. Axis 0: columns, stride = row length.
        const int real_stride = axis == 1 ? 1 : static_cast<int>(cols);
        const int real_dist = axis == 1 ? static_cast<int>(cols) : 1;
        const int cplx_stride = axis == 1 ? 1 : static_cast<int>(cols);
        const int cplx_dist = axis == 1 ? static_cast<int>(nh) : 1;
        const std::size_t cplx_size = axis == 1 ? rows * nh : nh * cols;
        AlignedVector<double> rbuf(rows * cols);
        AlignedVector<cplx> cbuf(cplx_size);
        auto* cptr = reinterpret_cast<fftw_complex*>(cbuf.data());
        if (kind == Kind::R2CAxis) {
          return fftw_plan_many_dft_r2c(1, &len, static_cast<int>(other), rbuf.data(), nullptr,
                                        real_stride, real_dist, cptr, nullptr, cplx_stride,
                                        cplx_dist, kFlags);
        }
        return fftw_plan_many_dft_c2r(1, &len, static_cast<int>(other), cptr, nullptr,
                                      cplx_stride, cplx_dist, rbuf.data(), nullptr, real_stride,
                                      real_dist, kFlags | FFTW_DESTROY_INPUT);
      }
    }
    return nullptr;
  }

  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

void forward(cplx* data, std::size_t n, std::size_t howmany) {
  fftw_execute_dft(PlanCache::instance().get({Kind::C2C1d, FFTW_FORWARD, n, howmany, 0}),
                   as_fftw(data), as_fftw(data));
}

void backward(cplx* data, std::size_t n, std::size_t howmany) {
  fftw_execute_dft(PlanCache::instance().get({Kind::C2C1d, FFTW_BACKWARD, n, howmany, 0}),
                   as_fftw(data), as_fftw(data));
}

void forward_2d(cplx* data, std::size_t n0, std::size_t n1) {
  fftw_execute_dft(PlanCache::instance().get({Kind::C2C2d, FFTW_FORWARD, n0, n1, 0}),
                   as_fftw(data), as_fftw(data));
}

void backward_2d(cplx* data, std::size_t n0, std::size_t n1) {
  fftw_execute_dft(PlanCache::instance().get({Kind::C2C2d, FFTW_BACKWARD, n0, n1, 0}),
                   as_fftw(data), as_fftw(data));
}

void r2c_axis(const double* in, cplx* out, std::size_t n_rows, std::size_t n_cols, int axis) {
  fftw_execute_dft_r2c(
      PlanCache::instance().get({Kind::R2CAxis, 0, n_rows, n_cols, static_cast<std::size_t>(axis)}),
      const_cast<double*>(in), as_fftw(out));
}

void c2r_axis(cplx* in, double* out, std::size_t n_rows, std::size_t n_cols, int axis) {
  fftw_execute_dft_c2r(
      PlanCache::instance().get({Kind::C2RAxis, 0, n_rows, n_cols, static_cast<std::size_t>(axis)}),
      as_fftw(in), out);
}

}  // namespace fft
}  // namespace qchaos
