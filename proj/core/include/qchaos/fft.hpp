#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <new>
#include <vector>

namespace qchaos {

using cplx = std::complex<double>;

namespace detail {
void* aligned_alloc_bytes(std::size_t bytes);
void aligned_free_bytes(void* p) noexcept;
}  // namespace detail

/// SIMD-aligned allocator so every buffer can be handed to the FFT backend.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) {
    void* p = detail::aligned_alloc_bytes(n * sizeof(T));
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { detail::aligned_free_bytes(p); }
  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

template <class T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

namespace fft {

// Plans are created once per shape (guarded by a mutex) and executed through
// the thread-safe new-array interface. All transforms are unnormalized.

/// In-place 1-D complex transform of length n, applied to `howmany` contiguous
/// signals (dist = n).
void forward(cplx* data, std::size_t n, std::size_t howmany = 1);
void backward(cplx* data, std::size_t n, std::size_t howmany = 1);

/// In-place 2-D complex transform of an n0 x n1 row-major array.
void forward_2d(cplx* data, std::size_t n0, std::size_t n1);
void backward_2d(cplx* data, std::size_t n0, std::size_t n1);

/// Strided batches of real<->complex transforms along one axis of a row-major
/// n_rows x n_cols real array. Axis 1 transforms each row (length n_cols);
/// axis 0 transforms each column (length n_rows). The spectrum buffer holds
/// the half spectrum in the same layout with the transformed axis shortened to
/// n/2+1.
void r2c_axis(const double* in, cplx* out, std::size_t n_rows, std::size_t n_cols, int axis);
void c2r_axis(cplx* in, double* out, std::size_t n_rows, std::size_t n_cols, int axis);

}  // namespace fft
}  // namespace qchaos
