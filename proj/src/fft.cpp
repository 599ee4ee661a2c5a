#include "fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace semsar::detail {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per (shape, direction) on aligned scratch and
// then reused with fftw_execute_dft on thread-local aligned buffers.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t rows, std::size_t cols, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto key = std::make_tuple(rows, cols, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        const std::size_t n = rows * cols;
        auto* a = fftw_alloc_complex(n);
        auto* b = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), a, b,
                                          sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
        fftw_free(a);
        fftw_free(b);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

struct Scratch {
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    std::size_t capacity = 0;

    ~Scratch() {
        fftw_free(in);
        fftw_free(out);
    }

    void reserve(std::size_t n) {
        if (n <= capacity) return;
        fftw_free(in);
        fftw_free(out);
        in = fftw_alloc_complex(n);
        out = fftw_alloc_complex(n);
        capacity = n;
    }
};

} // namespace

void unitary_dft2(std::span<const cplx> in, std::span<cplx> out, std::size_t rows, std::size_t cols, int sign) {
    const std::size_t n = rows * cols;
    fftw_plan plan = cache().get(rows, cols, sign);
    thread_local Scratch scratch;
    scratch.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        scratch.in[i][0] = in[i].real();
        scratch.in[i][1] = in[i].imag();
    }
    fftw_execute_dft(plan, scratch.in, scratch.out);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) out[i] = cplx(scratch.out[i][0] * scale, scratch.out[i][1] * scale);
}

} // namespace semsar::detail
