#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace fsw {

using cplx = std::complex<double>;

struct GridSpec {
    int n1 = 16;
    int n2 = 16;
    int nz = 33;
    double l1 = 6.283185307179586;
    double l2 = 6.283185307179586;
    double b = 1.0;

    bool operator==(const GridSpec&) const = default;
};

// Periodic N1 x N2 surface grid times a Chebyshev-Gauss-Lobatto column on
// [-b, 0]. Vertical index 0 is the bottom, nz-1 the surface.
//
// Physical layout: i1 + n1*(i2 + n2*iz). Spectral layout (real-to-complex,
// last dimension halved): j1 + n1h*(j2 + n2*iz), j1 in [0, n1/2].
// Spectral coefficients are normalized so f(x) = sum_n c_n exp(i k_n . x).
class Grid {
public:
    static std::shared_ptr<const Grid> create(const GridSpec& s);
    ~Grid();
    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;

    const GridSpec& spec() const { return spec_; }
    int n1() const { return spec_.n1; }
    int n2() const { return spec_.n2; }
    int nz() const { return spec_.nz; }
    double l1() const { return spec_.l1; }
    double l2() const { return spec_.l2; }
    double b() const { return spec_.b; }

    std::size_t plane() const { return std::size_t(spec_.n1) * spec_.n2; }
    std::size_t points() const { return plane() * spec_.nz; }
    int n1h() const { return spec_.n1 / 2 + 1; }
    std::size_t splane() const { return std::size_t(n1h()) * spec_.n2; }

    int mode2(int j2) const { return j2 <= spec_.n2 / 2 ? j2 : j2 - spec_.n2; }
    double k1(int j1) const { return two_pi_ * j1 / spec_.l1; }
    double k2(int j2) const { return two_pi_ * mode2(j2) / spec_.l2; }
    bool nyquist(int j1, int j2) const;
    // 2/3-rule retained set
    bool resolved(int j1, int j2) const;
    // multiplicity of a half-spectrum entry in Parseval sums (1 or 2)
    double hermitian_weight(int j1) const;

    double x1(int i1) const { return spec_.l1 * i1 / spec_.n1; }
    double x2(int i2) const { return spec_.l2 * i2 / spec_.n2; }
    const std::vector<double>& x3() const { return x3_; }
    // Dense row-major collocation matrices on the physical x3 nodes.
    const std::vector<double>& D() const { return d1_; }
    const std::vector<double>& D2() const { return d2_; }
    // Clenshaw-Curtis weights on [-b, 0].
    const std::vector<double>& weights() const { return w_; }
    double cell_area() const { return spec_.l1 * spec_.l2 / double(plane()); }

    void forward(const double* in, cplx* out, int layers) const;
    void inverse(const cplx* in, double* out, int layers) const;

private:
    explicit Grid(const GridSpec& s);
    struct Plans;

    GridSpec spec_;
    double two_pi_;
    std::vector<double> x3_, d1_, d2_, w_;
    std::unique_ptr<Plans> plans_;
};

using GridPtr = std::shared_ptr<const Grid>;

void require_same(const GridPtr& a, const GridPtr& b);

// Chebyshev-Gauss-Lobatto helpers on [-1, 1], ascending.
std::vector<double> cgl_nodes(int n_points);
std::vector<double> cgl_diff_matrix(const std::vector<double>& nodes);
std::vector<double> clenshaw_curtis_weights(int n_points);

}  // namespace fsw
