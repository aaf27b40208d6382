// Grids on the flat torus, periodic finite-difference calculus, quadrature,
// and the exact 1-Wasserstein metric in one dimension.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace mfglab {

// Throws std::runtime_error when a precondition fails.
inline void check(bool ok, const std::string& msg) {
    if (!ok) throw std::runtime_error(msg);
}

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Uniform periodic grid on the d-dimensional unit torus; n points per axis,
// node coordinates i/n, total cell volume 1.
struct TorusGrid {
    int dim = 1;
    int n = 1;

    TorusGrid() = default;
    TorusGrid(int dim_, int n_) : dim(dim_), n(n_) {
        check(dim >= 1, "TorusGrid: dim >= 1");
        check(n >= 2, "TorusGrid: n >= 2");
    }

    double spacing() const { return 1.0 / n; }
    // Volume of one cell, h^d.
    double cell_volume() const;
    std::int64_t num_nodes() const;
    // Stride of axis a in row-major flat indexing (axis 0 slowest).
    std::int64_t stride(int axis) const;
    // Coordinate index along an axis for a flat node index.
    int coord(std::int64_t node, int axis) const;
    // Node coordinate (point on the torus) along an axis.
    double point(std::int64_t node, int axis) const { return coord(node, axis) * spacing(); }
    // Flat index of the periodic neighbour one step along an axis.
    std::int64_t shift(std::int64_t node, int axis, int steps) const;

    bool operator==(const TorusGrid& o) const { return dim == o.dim && n == o.n; }
    bool operator!=(const TorusGrid& o) const { return !(*this == o); }
};

// Scalar function sampled at grid nodes.
struct Field {
    TorusGrid grid;
    Vec values;

    Field() = default;
    explicit Field(const TorusGrid& g) : grid(g), values(Vec::Zero(g.num_nodes())) {}
    Field(const TorusGrid& g, Vec v) : grid(g), values(std::move(v)) {
        check(values.size() == grid.num_nodes(), "Field: value count must equal n^d");
    }

    template <class Fun>
    static Field from_fn(const TorusGrid& g, Fun f) {
        check(g.dim == 1, "Field::from_fn: 1-D overload");
        Field out(g);
        for (std::int64_t i = 0; i < g.num_nodes(); ++i) out.values[i] = f(g.point(i, 0));
        return out;
    }
};

// d-component vector function sampled at grid nodes; column a holds axis a.
struct VectorField {
    TorusGrid grid;
    Mat values;  // num_nodes x dim

    VectorField() = default;
    explicit VectorField(const TorusGrid& g) : grid(g), values(Mat::Zero(g.num_nodes(), g.dim)) {}
    VectorField(const TorusGrid& g, Mat v) : grid(g), values(std::move(v)) {
        check(values.rows() == grid.num_nodes() && values.cols() == grid.dim,
              "VectorField: component count must equal d*n^d");
    }
};

// Probability measure as a nonnegative histogram density; cell_volume * sum = 1.
struct ProbMeasure {
    TorusGrid grid;
    Vec density;

    ProbMeasure() = default;
    ProbMeasure(const TorusGrid& g, Vec d) : grid(g), density(std::move(d)) { validate(); }

    // Uniform measure (density identically 1).
    static ProbMeasure uniform(const TorusGrid& g) {
        return ProbMeasure(g, Vec::Ones(g.num_nodes()));
    }
    // Rescales a nonnegative, not identically zero density to unit mass.
    static ProbMeasure normalized(const TorusGrid& g, Vec d);

    void validate() const;
    double total_mass() const { return grid.cell_volume() * density.sum(); }
};

// Centered periodic differences, second-order accurate.
VectorField gradient(const Field& f);

// Centered periodic divergence; exact negative adjoint of gradient under the
// plain grid inner product (summation by parts).
Field divergence(const VectorField& v);

// Direct 2d+1-point periodic stencil (not the gradient/divergence composition).
Field laplacian(const Field& f);

// Midpoint quadrature: cell_volume * sum of f.
double integrate(const Field& f);
// Integral of f against a measure, cell_volume * sum(f * density).
double integrate(const Field& f, const ProbMeasure& m);

// Exact 1-Wasserstein distance on the circle (d = 1 only) via the minimal
// L1 distance between cumulative functions over all offsets.
double wasserstein1(const ProbMeasure& a, const ProbMeasure& b);

// Text serialization: header "# torus-field v1 dim=<d> n=<n> kind=<...>",
// then one value line per node in row-major order.
void write_field(std::ostream& os, const Field& f);
void write_field(std::ostream& os, const VectorField& v);
void write_field(std::ostream& os, const ProbMeasure& m);
void write_field_file(const std::string& path, const Field& f);
void write_field_file(const std::string& path, const VectorField& v);
void write_field_file(const std::string& path, const ProbMeasure& m);

struct LoadedField {
    std::string kind;  // "field", "vector" or "measure"
    TorusGrid grid;
    Mat values;  // num_nodes x 1 for scalar kinds, x dim for vectors
};
LoadedField read_field(std::istream& is);
LoadedField read_field_file(const std::string& path);
Field as_field(const LoadedField& lf);
VectorField as_vector_field(const LoadedField& lf);
ProbMeasure as_measure(const LoadedField& lf);

}  // namespace mfglab
