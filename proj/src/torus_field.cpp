#include "mfglab/torus_field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mfglab {

double TorusGrid::cell_volume() const {
    return std::pow(spacing(), dim);
}

std::int64_t TorusGrid::num_nodes() const {
    std::int64_t total = 1;
    for (int a = 0; a < dim; ++a) total *= n;
    return total;
}

std::int64_t TorusGrid::stride(int axis) const {
    check(axis >= 0 && axis < dim, "TorusGrid::stride: axis out of range");
    std::int64_t s = 1;
    for (int a = dim - 1; a > axis; --a) s *= n;
    return s;
}

int TorusGrid::coord(std::int64_t node, int axis) const {
    return static_cast<int>((node / stride(axis)) % n);
}

std::int64_t TorusGrid::shift(std::int64_t node, int axis, int steps) const {
    const std::int64_t s = stride(axis);
    const int c = coord(node, axis);
    int cs = (c + steps) % n;
    if (cs < 0) cs += n;
    return node + static_cast<std::int64_t>(cs - c) * s;
}

ProbMeasure ProbMeasure::normalized(const TorusGrid& g, Vec d) {
    check(d.size() == g.num_nodes(), "ProbMeasure: density size mismatch");
    check(d.minCoeff() >= 0.0, "ProbMeasure: density must be nonnegative");
    const double mass = g.cell_volume() * d.sum();
    check(mass > 0.0, "ProbMeasure: density must have positive mass");
    return ProbMeasure(g, d / mass);
}

void ProbMeasure::validate() const {
    check(density.size() == grid.num_nodes(), "ProbMeasure: density size mismatch");
    check(density.minCoeff() >= -1e-12, "ProbMeasure: density must be nonnegative");
    check(std::abs(total_mass() - 1.0) <= 1e-12, "ProbMeasure: total mass must equal 1");
}

VectorField gradient(const Field& f) {
    const TorusGrid& g = f.grid;
    VectorField out(g);
    const double inv2h = 1.0 / (2.0 * g.spacing());
    for (int a = 0; a < g.dim; ++a)
        for (std::int64_t i = 0; i < g.num_nodes(); ++i)
            out.values(i, a) = (f.values[g.shift(i, a, 1)] - f.values[g.shift(i, a, -1)]) * inv2h;
    return out;
}

Field divergence(const VectorField& v) {
    const TorusGrid& g = v.grid;
    Field out(g);
    const double inv2h = 1.0 / (2.0 * g.spacing());
    for (int a = 0; a < g.dim; ++a)
        for (std::int64_t i = 0; i < g.num_nodes(); ++i)
            out.values[i] += (v.values(g.shift(i, a, 1), a) - v.values(g.shift(i, a, -1), a)) * inv2h;
    return out;
}

Field laplacian(const Field& f) {
    const TorusGrid& g = f.grid;
    Field out(g);
    const double invh2 = 1.0 / (g.spacing() * g.spacing());
    for (int a = 0; a < g.dim; ++a)
        for (std::int64_t i = 0; i < g.num_nodes(); ++i)
            out.values[i] += (f.values[g.shift(i, a, 1)] - 2.0 * f.values[i] +
                              f.values[g.shift(i, a, -1)]) * invh2;
    return out;
}

double integrate(const Field& f) {
    return f.grid.cell_volume() * f.values.sum();
}

double integrate(const Field& f, const ProbMeasure& m) {
    check(f.grid == m.grid, "integrate: grid mismatch");
    return f.grid.cell_volume() * f.values.dot(m.density);
}

double wasserstein1(const ProbMeasure& a, const ProbMeasure& b) {
    check(a.grid == b.grid, "wasserstein1: grid mismatch");
    check(a.grid.dim == 1, "wasserstein1: only dimension 1 is supported");
    const int n = a.grid.n;
    const double h = a.grid.spacing();
    // Cumulative difference of cell masses; the circular W1 is the minimal
    // L1 norm of (cumsum - offset), attained at the median offset.
    Vec c(n);
    double run = 0.0;
    for (int i = 0; i < n; ++i) {
        run += (a.density[i] - b.density[i]) * h;
        c[i] = run;
    }
    Vec sorted = c;
    std::sort(sorted.data(), sorted.data() + n);
    const double median = sorted[(n - 1) / 2];
    return h * (c.array() - median).abs().sum();
}

static void write_header(std::ostream& os, const TorusGrid& g, const char* kind) {
    os << "# torus-field v1 dim=" << g.dim << " n=" << g.n << " kind=" << kind << "\n";
    os << std::setprecision(17);
}

void write_field(std::ostream& os, const Field& f) {
    write_header(os, f.grid, "field");
    for (std::int64_t i = 0; i < f.grid.num_nodes(); ++i) os << f.values[i] << "\n";
}

void write_field(std::ostream& os, const VectorField& v) {
    write_header(os, v.grid, "vector");
    for (std::int64_t i = 0; i < v.grid.num_nodes(); ++i) {
        for (int a = 0; a < v.grid.dim; ++a) os << (a ? " " : "") << v.values(i, a);
        os << "\n";
    }
}

void write_field(std::ostream& os, const ProbMeasure& m) {
    write_header(os, m.grid, "measure");
    for (std::int64_t i = 0; i < m.grid.num_nodes(); ++i) os << m.density[i] << "\n";
}

template <class T>
static void write_file_impl(const std::string& path, const T& x) {
    std::ofstream os(path);
    check(os.good(), "cannot open for writing: " + path);
    write_field(os, x);
    check(os.good(), "write failed: " + path);
}

void write_field_file(const std::string& path, const Field& f) { write_file_impl(path, f); }
void write_field_file(const std::string& path, const VectorField& v) { write_file_impl(path, v); }
void write_field_file(const std::string& path, const ProbMeasure& m) { write_file_impl(path, m); }

LoadedField read_field(std::istream& is) {
    std::string header;
    check(static_cast<bool>(std::getline(is, header)), "torus-field: missing header");
    std::istringstream hs(header);
    std::string hash, tag, tok;
    hs >> hash >> tag >> tok;
    check(hash == "#" && tag == "torus-field" && tok == "v1", "torus-field: bad header: " + header);
    int dim = 0, n = 0;
    std::string kind;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        check(eq != std::string::npos, "torus-field: bad header token: " + tok);
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "dim") dim = std::stoi(val);
        else if (key == "n") n = std::stoi(val);
        else if (key == "kind") kind = val;
        // Unknown keys (e.g. N= extensions) are tolerated by this reader.
    }
    check(dim >= 1 && n >= 2, "torus-field: invalid dim/n in header");
    check(kind == "field" || kind == "vector" || kind == "measure",
          "torus-field: unknown kind: " + kind);
    LoadedField out;
    out.kind = kind;
    out.grid = TorusGrid(dim, n);
    const int cols = (kind == "vector") ? dim : 1;
    out.values.resize(out.grid.num_nodes(), cols);
    for (std::int64_t i = 0; i < out.grid.num_nodes(); ++i)
        for (int a = 0; a < cols; ++a)
            check(static_cast<bool>(is >> out.values(i, a)), "torus-field: truncated data");
    return out;
}

LoadedField read_field_file(const std::string& path) {
    std::ifstream is(path);
    check(is.good(), "cannot open for reading: " + path);
    return read_field(is);
}

Field as_field(const LoadedField& lf) {
    check(lf.kind == "field", "as_field: kind mismatch");
    return Field(lf.grid, lf.values.col(0));
}

VectorField as_vector_field(const LoadedField& lf) {
    check(lf.kind == "vector", "as_vector_field: kind mismatch");
    return VectorField(lf.grid, lf.values);
}

ProbMeasure as_measure(const LoadedField& lf) {
    check(lf.kind == "measure", "as_measure: kind mismatch");
    return ProbMeasure(lf.grid, lf.values.col(0));
}

}  // namespace mfglab
