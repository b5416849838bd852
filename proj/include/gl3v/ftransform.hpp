#pragma once

#include "gl3v/mellin.hpp"
#include "gl3v/special_fn_types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace gl3v {

// The contour Re s = sigma, sampled at step h in t. H is a lower bound on the
// height actually reached; the grid grows until the spectral tail is below tol.
struct VerticalLineSpec {
    double sigma = 0.75;
    double H = 400.0;
    double h = 0.05;

    // Throws ContourError for sigma < 1/2, DomainError for bad H or h.
    void validate() const;
};

enum class FRoute { automatic, f_side, phi_side };

struct FValue {
    cplx value{};
    double error = 0.0;
};

struct FGridOptions {
    double x_min = 1e-4;      // smallest |x| kept on the output grid
    double tol = 1e-13;       // relative spectral tail at which the grid stops growing
    int max_log2 = 23;        // largest FFT length 2^max_log2
    double drop_below = 1e-15;  // F beyond the last |F| > drop_below * max|F| is treated as 0
    bool keep_spectrum = false;  // retain the t-samples for exact()
};

// F(x) for one (params, family, line), evaluated on a u = log|x| grid by FFT
// of the Mellin-side integrand and interpolated in u.
//
// f_side:   integrand prod_j G_{delta_j+eta}(s - lambda_j) M_eta f(1-s).
// phi_side: integrand G G M_{delta3+eta} phi(s - lambda3); the rescaled
//           phi_1(x) = phi(Y x) is used when Y >= 1.
// automatic picks phi_side for the gaussian profile and for Y >= 1 with
// Re lambda3 <= 3, and f_side otherwise.
class FTransform {
public:
    FTransform(const EmbeddingParams& params, const TestFunctionFamily& fam, VerticalLineSpec line = {},
               FRoute route = FRoute::automatic, FGridOptions opts = {});

    FValue operator()(double x) const;
    // Direct trapezoid sum over the stored spectrum (needs opts.keep_spectrum).
    FValue exact(double x) const;

    FRoute route() const { return route_; }
    bool rescaled() const { return scale_ != 1.0; }
    std::size_t fft_length() const { return n_; }
    double height() const { return n_ * line_.h / 2.0; }
    // |x| beyond which F is below drop_below * max|F| or the noise floor.
    double x_max() const { return x_max_; }
    double x_min() const { return x_min_; }
    double max_abs() const { return max_abs_; }
    // Estimated error contributed by the truncated spectrum, relative to |x|^{1-sigma}.
    double tail() const { return tail_; }

private:
    void build();
    std::vector<cplx> spectrum(std::size_t n, double& tail) const;

    EmbeddingParams params_;
    TestFunctionFamily fam_;
    VerticalLineSpec line_;
    FRoute route_;
    FGridOptions opts_;
    double scale_ = 1.0;  // Y on the rescaled route
    cplx prefactor_{1.0};

    std::size_t n_ = 0;
    double u0_ = 0.0;     // start of the input window
    double v_lo_ = 0.0;   // first stored output abscissa, in log(|x| / scale)
    double dv_ = 0.0;
    std::vector<cplx> s_;  // S(v) on the stored slice
    std::vector<cplx> spectrum_;
    double x_min_ = 0.0, x_max_ = 0.0, max_abs_ = 0.0, tail_ = 0.0, edge_error_ = 0.0;
};

// Memoized FTransform; instances are immutable after construction and
// shared between callers.
std::shared_ptr<const FTransform> cached_transform(const EmbeddingParams& params, const TestFunctionFamily& fam,
                                                   const VerticalLineSpec& line = {},
                                                   FRoute route = FRoute::automatic);
void clear_transform_cache();

// F(x) with its error estimate. Warns on stderr when the estimate exceeds warn_tol.
FValue voronoi_transform_F(const EmbeddingParams& params, const TestFunctionFamily& fam, double x,
                           const VerticalLineSpec& line = {}, double warn_tol = 1e300);

// The repeated integral over R^3 with the x3 integral done in closed form and
// the x1, x2 rays rotated into the decaying half-planes. gaussian profile only;
// throws ConvergenceError unless Re l1 > Re l2 > Re l3.
cplx direct_F_oracle(const EmbeddingParams& params, const TestFunctionFamily& fam, double x, double tol = 1e-11);

enum class Regime { small_y, small_x, power, rapid };

struct RegimeReport {
    Regime regime;
    std::string label;
    double x = 0.0;
    double Y = 0.0;
    double measured = 0.0;   // |F(x)|
    double envelope = 0.0;   // bound with implied constant 1
    double x_exponent = 0.0;  // predicted power of |x| in the envelope
    double ratio = 0.0;       // measured / envelope
    bool pole_overlap = false;  // poles of the two G factors coincide
};

std::string to_string(Regime r);

RegimeReport regime_report(const EmbeddingParams& params, const TestFunctionFamily& fam, double x,
                           const VerticalLineSpec& line = {}, double decay_order = 4.0);

// Fitted exponent of one regime envelope against its prediction.
// small_y: steepest decade slope of max|F| in x at Y = Y_small, predicted -decay_order.
// small_x: Y-exponent of max_{[Y/8, Y]} |F| / |x|^{1/2}, predicted -1/2 - Re l3.
// power:   Y-exponent of max_{[Y, Y^3]} |F| (|x|/Y)^{-3/4 - Re l3/2}, predicted -Re l3.
// rapid:   Y-exponent of max_{|x| >= Y^3} |F|, predicted 3/2.
// Upper-bound checks pass when measured <= predicted + tol, the others when
// |measured - predicted| <= tol.
struct RegimeSlope {
    Regime regime;
    double measured = 0.0;
    double predicted = 0.0;
    bool upper_bound = false;
    bool pass = false;
};

struct RegimeSlopeOptions {
    std::vector<double> Y_grid{4.0, 8.0, 16.0, 32.0};
    double Y_small = 0.5;
    double decay_order = 4.0;
    double tol = 0.15;
    int samples = 2000;  // log-spaced points per envelope window
};

std::vector<RegimeSlope> regime_slopes(const EmbeddingParams& params, const RegimeSlopeOptions& opts = {},
                                       const VerticalLineSpec& line = {});

} // namespace gl3v
