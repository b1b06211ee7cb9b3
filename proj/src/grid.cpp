#include "wavefoa/grid.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <thread>

namespace wavefoa {

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::max() const {
    double m = values_.empty() ? 0.0 : values_[0];
    for (double v : values_) m = std::max(m, v);
    return m;
}

double ScalarField::min() const {
    double m = values_.empty() ? 0.0 : values_[0];
    for (double v : values_) m = std::min(m, v);
    return m;
}

double ScalarField::sum() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
}

bool ScalarField::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

namespace {

// Persistent workers for the row-parallel stencil path; spawning a
// thread per step would dominate small-grid step times. One job runs at
// a time (submissions serialize), block boundaries depend only on the
// requested thread count, and every writer owns disjoint rows, so the
// output bits never depend on scheduling.
class RowPool {
public:
    static RowPool& instance() {
        static RowPool pool;
        return pool;
    }

    void run(int y_begin, int y_end, int threads, const std::function<void(int, int)>& fn) {
        std::lock_guard<std::mutex> submission(submit_mutex_);
        ensure_workers(threads - 1);

        blocks_.clear();
        const int rows = y_end - y_begin;
        const int base = rows / threads;
        const int extra = rows % threads;
        int y = y_begin;
        for (int t = 0; t < threads; ++t) {
            const int count = base + (t < extra ? 1 : 0);
            blocks_.emplace_back(y, y + count);
            y += count;
        }

        {
            std::lock_guard<std::mutex> lk(mutex_);
            fn_ = &fn;
            active_ = threads - 1;
            remaining_ = threads - 1;
            ++generation_;
        }
        cv_.notify_all();
        fn(blocks_.back().first, blocks_.back().second);
        std::unique_lock<std::mutex> lk(mutex_);
        done_cv_.wait(lk, [&] { return remaining_ == 0; });
        fn_ = nullptr;
    }

private:
    RowPool() = default;
    ~RowPool() {
        {
            std::lock_guard<std::mutex> lk(mutex_);
            stop_ = true;
        }
        cv_.notify_all();
        for (auto& w : workers_) w.join();
    }

    void ensure_workers(int needed) {
        std::lock_guard<std::mutex> lk(mutex_);
        while (static_cast<int>(workers_.size()) < needed) {
            const int idx = static_cast<int>(workers_.size());
            const std::uint64_t seen = generation_;
            workers_.emplace_back([this, idx, seen] { worker_loop(idx, seen); });
        }
    }

    void worker_loop(int idx, std::uint64_t seen) {
        for (;;) {
            std::unique_lock<std::mutex> lk(mutex_);
            cv_.wait(lk, [&] { return stop_ || (generation_ != seen && idx < active_); });
            if (stop_) return;
            seen = generation_;
            const std::function<void(int, int)>* fn = fn_;
            const std::pair<int, int> block = blocks_[static_cast<size_t>(idx)];
            lk.unlock();
            (*fn)(block.first, block.second);
            lk.lock();
            if (--remaining_ == 0) done_cv_.notify_one();
        }
    }

    std::mutex submit_mutex_;
    std::mutex mutex_;
    std::condition_variable cv_;
    std::condition_variable done_cv_;
    std::vector<std::thread> workers_;
    std::vector<std::pair<int, int>> blocks_;
    const std::function<void(int, int)>* fn_ = nullptr;
    std::uint64_t generation_ = 0;
    int active_ = 0;
    int remaining_ = 0;
    bool stop_ = false;
};

} // namespace

void parallel_rows(int y_begin, int y_end, int threads,
                   const std::function<void(int, int)>& fn) {
    const int rows = y_end - y_begin;
    if (rows <= 0) return;
    threads = std::clamp(threads, 1, rows);
    if (threads == 1) {
        fn(y_begin, y_end);
        return;
    }
    RowPool::instance().run(y_begin, y_end, threads, fn);
}

ScalarField laplacian_5pt(const ScalarField& f, int threads) {
    const int w = f.width();
    const int h = f.height();
    if (w < 3 || h < 3)
        throw OutOfDomainError("5-point stencil needs a grid of at least 3x3");
    threads = effective_threads(f.grid(), threads);
    ScalarField out(f.grid(), 0.0);
    const double* src = f.values().data();
    double* dst = out.values().data();
    parallel_rows(1, h - 1, threads, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const double* row = src + static_cast<size_t>(y) * w;
            double* orow = dst + static_cast<size_t>(y) * w;
            for (int x = 1; x < w - 1; ++x) {
                orow[x] = row[x + 1] + row[x - 1] + row[x + w] + row[x - w] - 4.0 * row[x];
            }
        }
    });
    return out;
}

void zero_boundary(ScalarField& f) {
    const int w = f.width();
    const int h = f.height();
    double* v = f.values().data();
    for (int x = 0; x < w; ++x) {
        v[x] = 0.0;
        v[static_cast<size_t>(h - 1) * w + x] = 0.0;
    }
    for (int y = 0; y < h; ++y) {
        v[static_cast<size_t>(y) * w] = 0.0;
        v[static_cast<size_t>(y) * w + w - 1] = 0.0;
    }
}

ScalarField apply_dirichlet(ScalarField f) {
    zero_boundary(f);
    return f;
}

double bilinear_sample(const ScalarField& f, Vec2 p) {
    const int w = f.width();
    const int h = f.height();
    if (!(p.x >= 0.0 && p.x <= w - 1 && p.y >= 0.0 && p.y <= h - 1))
        throw OutOfDomainError("sample point (" + std::to_string(p.x) + ", " +
                               std::to_string(p.y) + ") outside retina");
    int x0 = std::clamp(static_cast<int>(std::floor(p.x)), 0, w - 1);
    int y0 = std::clamp(static_cast<int>(std::floor(p.y)), 0, h - 1);
    if (x0 == w - 1 && x0 > 0) --x0;
    if (y0 == h - 1 && y0 > 0) --y0;
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = p.x - x0;
    const double fy = p.y - y0;
    const double v00 = f.at(x0, y0);
    const double v10 = f.at(x1, y0);
    const double v01 = f.at(x0, y1);
    const double v11 = f.at(x1, y1);
    return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
}

namespace {

// Central-difference components at an interior node.
inline double node_gx(const ScalarField& f, int x, int y) {
    return 0.5 * (f.at(x + 1, y) - f.at(x - 1, y));
}
inline double node_gy(const ScalarField& f, int x, int y) {
    return 0.5 * (f.at(x, y + 1) - f.at(x, y - 1));
}

} // namespace

Vec2 gradient_at(const ScalarField& f, Vec2 p) {
    const int w = f.width();
    const int h = f.height();
    if (!(p.x >= 1.0 && p.x <= w - 2 && p.y >= 1.0 && p.y <= h - 2))
        throw OutOfDomainError("gradient point (" + std::to_string(p.x) + ", " +
                               std::to_string(p.y) + ") not inside the interior");
    const int x0 = static_cast<int>(std::floor(p.x));
    const int y0 = static_cast<int>(std::floor(p.y));
    const double fx = p.x - x0;
    const double fy = p.y - y0;
    // A weight-zero neighbour may sit on the boundary ring where the
    // central difference is undefined; collapse it onto the node.
    const int x1 = (fx == 0.0) ? x0 : x0 + 1;
    const int y1 = (fy == 0.0) ? y0 : y0 + 1;
    const double w00 = (1.0 - fx) * (1.0 - fy);
    const double w10 = fx * (1.0 - fy);
    const double w01 = (1.0 - fx) * fy;
    const double w11 = fx * fy;
    Vec2 g;
    g.x = w00 * node_gx(f, x0, y0) + w10 * node_gx(f, x1, y0) + w01 * node_gx(f, x0, y1) +
          w11 * node_gx(f, x1, y1);
    g.y = w00 * node_gy(f, x0, y0) + w10 * node_gy(f, x1, y0) + w01 * node_gy(f, x0, y1) +
          w11 * node_gy(f, x1, y1);
    return g;
}

void gradient_fields(const ScalarField& f, ScalarField& gx, ScalarField& gy) {
    const int w = f.width();
    const int h = f.height();
    gx = ScalarField(f.grid(), 0.0);
    gy = ScalarField(f.grid(), 0.0);
    for (int y = 1; y < h - 1; ++y)
        for (int x = 1; x < w - 1; ++x) {
            gx.at(x, y) = node_gx(f, x, y);
            gy.at(x, y) = node_gy(f, x, y);
        }
}

std::uint64_t field_checksum(const ScalarField& f) {
    std::uint64_t hash = 14695981039346656037ull;
    auto vals = f.values();
    const auto* bytes = reinterpret_cast<const unsigned char*>(vals.data());
    const size_t n = vals.size() * sizeof(double);
    for (size_t i = 0; i < n; ++i) {
        hash ^= bytes[i];
        hash *= 1099511628211ull;
    }
    return hash;
}

} // namespace wavefoa
