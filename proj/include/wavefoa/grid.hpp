#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wavefoa/errors.hpp"

namespace wavefoa {

/// Continuous retina coordinate, (x = column, y = row) in pixels.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

    double norm2() const { return x * x + y * y; }
};

/// Discrete retina: a width x height mesh with unit pixel spacing.
/// The stencil coefficients absorb the spacing, so no 1/h^2 factors
/// appear anywhere downstream. Raster containers allow any positive
/// size; stencil operations require at least 3x3 (one interior point).
struct Grid {
    int width = 0;
    int height = 0;

    Grid() = default;
    Grid(int w, int h) : width(w), height(h) {
        if (w < 1 || h < 1)
            throw OutOfDomainError("grid must be at least 1x1, got " +
                                   std::to_string(w) + "x" + std::to_string(h));
    }

    int size() const { return width * height; }
    int index(int x, int y) const { return y * width + x; }
    bool contains(Vec2 p) const {
        return p.x >= 0.0 && p.x <= width - 1 && p.y >= 0.0 && p.y <= height - 1;
    }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.width == b.width && a.height == b.height;
    }
};

/// A real-valued field over the retina, row-major (row = y, column = x).
/// Carrier for potentials, masses, brightness and saliency maps.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(Grid g, double fill = 0.0)
        : grid_(g), values_(static_cast<size_t>(g.size()), fill) {}
    ScalarField(Grid g, std::vector<double> values) : grid_(g), values_(std::move(values)) {
        if (values_.size() != static_cast<size_t>(grid_.size()))
            throw GridMismatchError("value count does not match grid size");
    }

    const Grid& grid() const { return grid_; }
    int width() const { return grid_.width; }
    int height() const { return grid_.height; }

    double& at(int x, int y) { return values_[static_cast<size_t>(grid_.index(x, y))]; }
    double at(int x, int y) const { return values_[static_cast<size_t>(grid_.index(x, y))]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    void fill(double v) { values_.assign(values_.size(), v); }

    double max_abs() const;
    double max() const;
    double min() const;
    double sum() const;
    bool all_finite() const;

private:
    Grid grid_{3, 3};
    std::vector<double> values_ = std::vector<double>(9, 0.0);
};

/// 5-point Laplacian, f(x+1,y)+f(x-1,y)+f(x,y+1)+f(x,y-1)-4f(x,y) on
/// interior points; the boundary ring of the result is 0. Partitioning
/// by row blocks does not change any output bit.
ScalarField laplacian_5pt(const ScalarField& f, int threads = 1);

/// Zero the boundary ring, leaving the interior untouched. Idempotent.
ScalarField apply_dirichlet(ScalarField f);
void zero_boundary(ScalarField& f);

/// Bilinear interpolation of the four nodes around p.
/// Throws OutOfDomainError for p outside [0, w-1] x [0, h-1].
double bilinear_sample(const ScalarField& f, Vec2 p);

/// Gradient of f at a continuous point: central differences at the four
/// surrounding nodes, bilinearly interpolated. p must be at least one
/// pixel away from the boundary, i.e. inside [1, w-2] x [1, h-2].
Vec2 gradient_at(const ScalarField& f, Vec2 p);

/// Node-centred gradient components as fields (central differences,
/// boundary ring 0). Used for probe sweeps over whole fields.
void gradient_fields(const ScalarField& f, ScalarField& gx, ScalarField& gy);

/// Run fn(y_begin, y_end) over contiguous row blocks, possibly on
/// several threads. Blocks are disjoint, so writers that only touch
/// their own rows produce identical bits for any thread count.
void parallel_rows(int y_begin, int y_end, int threads,
                   const std::function<void(int, int)>& fn);

/// Threads actually worth using for an elementwise pass over g: below
/// ~64k cells the pool handoff costs more than the row work. Purely a
/// scheduling decision, never changes output bits.
inline int effective_threads(const Grid& g, int threads) {
    return static_cast<long>(g.width) * g.height < 65536 ? 1 : threads;
}

/// FNV-1a over the raw bytes of the field values; run-to-run stable
/// fingerprint for determinism checks.
std::uint64_t field_checksum(const ScalarField& f);

} // namespace wavefoa
