#include "wgm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wgm/least_squares.hpp"
#include "wgm/physics.hpp"
#include "wgm/units.hpp"

namespace wgm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Lorentzian line terms for params laid out as
//   [c_1 .. c_k, w_1 .. w_k, A_1 .. A_k, b0, b1].
class LorentzianModel {
public:
    LorentzianModel(std::span<const double> x, std::span<const double> y, int lines)
        : x_(x), y_(y), lines_(lines) {}

    int parameter_count() const { return 3 * lines_ + 2; }

    void operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
        const auto n = static_cast<Eigen::Index>(x_.size());
        r.resize(n);
        if (jac) jac->resize(n, parameter_count());
        const int k = lines_;
        const double b0 = p[3 * k];
        const double b1 = p[3 * k + 1];
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = x_[i];
            double model = b0 + b1 * x;
            for (int l = 0; l < k; ++l) {
                const double c = p[l];
                const double w = p[k + l];
                const double a = p[2 * k + l];
                const double u = 2.0 * (x - c) / w;
                const double d = 1.0 + u * u;
                const double lor = 1.0 / d;
                model += a * lor;
                if (jac) {
                    const double dd = d * d;
                    (*jac)(i, l) = a * 4.0 * u / (w * dd);
                    (*jac)(i, k + l) = a * 2.0 * u * u / (w * dd);
                    (*jac)(i, 2 * k + l) = lor;
                }
            }
            if (jac) {
                (*jac)(i, 3 * k) = 1.0;
                (*jac)(i, 3 * k + 1) = x;
            }
            r[i] = model - y_[i];
        }
    }

private:
    std::span<const double> x_;
    std::span<const double> y_;
    int lines_;
};

struct LineSeed {
    double center, fwhm, amplitude;
};

struct Baseline {
    double offset, slope;
};

Baseline edge_baseline(std::span<const double> y) {
    const std::size_t n = y.size();
    const std::size_t edge = std::max<std::size_t>(2, n / 20);
    double left = 0, right = 0;
    for (std::size_t i = 0; i < edge; ++i) {
        left += y[i];
        right += y[n - 1 - i];
    }
    // Lorentzian wings rarely reach the baseline inside the window, so take
    // the lower edge level rather than interpolating a slope.
    return {std::min(left, right) / static_cast<double>(edge), 0.0};
}

double half_max_width(std::span<const double> x, std::span<const double> z, std::size_t peak) {
    const double half = 0.5 * z[peak];
    auto cross = [&](std::size_t from, int dir) -> std::optional<double> {
        std::size_t i = from;
        while (true) {
            if ((dir < 0 && i == 0) || (dir > 0 && i + 1 >= z.size())) return std::nullopt;
            const std::size_t j = dir < 0 ? i - 1 : i + 1;
            if (z[j] > z[i]) return std::nullopt;  // ran into another line
            if (z[j] <= half) {
                const double t = (z[i] - half) / (z[i] - z[j]);
                return std::abs(x[i] + t * (x[j] - x[i]) - x[from]);
            }
            i = j;
        }
    };
    const auto left = cross(peak, -1);
    const auto right = cross(peak, +1);
    if (left && right) return *left + *right;
    if (left) return 2.0 * *left;
    if (right) return 2.0 * *right;
    return 0.25 * std::abs(x.back() - x.front());
}

std::vector<LineSeed> prominent_lines(std::span<const double> x, std::span<const double> z) {
    const std::size_t n = z.size();
    const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
    const double range = *hi - *lo;
    struct Candidate {
        std::size_t index;
        double prominence;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(z[i] >= z[i - 1] && z[i] > z[i + 1])) continue;
        double left_min = z[i];
        std::size_t j = i;
        while (j > 0 && z[j - 1] <= z[i]) left_min = std::min(left_min, z[--j]);
        if (j > 0) left_min = std::min(left_min, z[j]);
        double right_min = z[i];
        j = i;
        while (j + 1 < n && z[j + 1] <= z[i]) right_min = std::min(right_min, z[++j]);
        const double prominence = z[i] - std::max(left_min, right_min);
        if (prominence >= 0.1 * range) candidates.push_back({i, prominence});
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) { return a.prominence > b.prominence; });
    if (candidates.empty()) {
        candidates.push_back({static_cast<std::size_t>(hi - z.begin()), range});
    }
    std::vector<LineSeed> seeds;
    for (std::size_t k = 0; k < std::min<std::size_t>(2, candidates.size()); ++k) {
        const auto i = candidates[k].index;
        seeds.push_back({x[i], half_max_width(x, z, i), z[i]});
    }
    return seeds;
}

struct LineFit {
    LmResult lm;
    int lines;
    double rms;
};

LineFit fit_lines(std::span<const double> x, std::span<const double> y,
                  const std::vector<LineSeed>& seeds, const Baseline& base) {
    const int k = static_cast<int>(seeds.size());
    LorentzianModel model(x, y, k);
    Eigen::VectorXd p(model.parameter_count());
    for (int l = 0; l < k; ++l) {
        p[l] = seeds[l].center;
        p[k + l] = seeds[l].fwhm;
        p[2 * k + l] = seeds[l].amplitude;
    }
    p[3 * k] = base.offset;
    p[3 * k + 1] = base.slope;
    auto lm = levenberg_marquardt(model, p);
    const double rms = std::sqrt(lm.residual.squaredNorm() / static_cast<double>(x.size()));
    return {std::move(lm), k, rms};
}

bool plausible_doublet(const LineFit& fit) {
    const auto& p = fit.lm.params;
    if (!(fit.lm.converged && p.allFinite() && p[4] > 0.0 && p[5] > 0.0 &&
          std::abs(p[2]) > 0.0 && std::abs(p[3]) > 0.0)) {
        return false;
    }
    // A vanishing companion line or two coincident lines is still one line.
    const double weak = std::min(p[4], p[5]), strong = std::max(p[4], p[5]);
    const double narrow = std::min(std::abs(p[2]), std::abs(p[3]));
    return weak > 1e-2 * strong && std::abs(p[1] - p[0]) > 0.05 * narrow;
}

}  // namespace

double DoubletFit::evaluate(double x) const {
    auto lor = [x](double c, double w, double a) {
        const double u = 2.0 * (x - c) / w;
        return a / (1.0 + u * u);
    };
    return lor(center1, fwhm1, amplitude1) + lor(center2, fwhm2, amplitude2) + baseline_offset +
           baseline_slope * x;
}

DoubletFit fit_doublet(std::span<const double> x_mhz, std::span<const double> y,
                       const std::optional<DoubletSeed>& seed) {
    if (x_mhz.size() != y.size()) throw std::invalid_argument("x and y differ in length");
    if (x_mhz.size() < 16) throw std::invalid_argument("doublet fit needs at least 16 samples");
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(x_mhz[i]) || !std::isfinite(y[i])) {
            throw std::invalid_argument("non-finite sample in spectrum");
        }
    }

    // Work on a centred abscissa and unit-height ordinate.
    const double x0 = 0.5 * (x_mhz.front() + x_mhz.back());
    double yscale = 0.0;
    for (double v : y) yscale = std::max(yscale, std::abs(v));
    if (yscale == 0.0) throw FitError("spectrum has no signal", {}, 0.0);
    std::vector<double> xs(x_mhz.size()), ys(y.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = x_mhz[i] - x0;
        ys[i] = y[i] / yscale;
    }

    const Baseline base = edge_baseline(ys);
    std::vector<double> z(ys.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = ys[i] - base.offset - base.slope * xs[i];

    std::vector<LineSeed> seeds;
    if (seed) {
        auto height_at = [&](double c) {
            const auto it = std::lower_bound(xs.begin(), xs.end(), c - x0);
            const auto idx = std::min<std::size_t>(it - xs.begin(), z.size() - 1);
            return std::max(z[idx], 1e-3);
        };
        seeds = {{seed->center1 - x0, seed->fwhm1, height_at(seed->center1)},
                 {seed->center2 - x0, seed->fwhm2, height_at(seed->center2)}};
    } else {
        seeds = prominent_lines(xs, z);
    }

    std::optional<LineFit> chosen;
    if (seeds.size() >= 2) {
        chosen = fit_lines(xs, ys, seeds, base);
    } else {
        const LineSeed main = seeds.front();
        LineFit single = fit_lines(xs, ys, {main}, base);
        // A numerically exact single line is never split further.
        if (single.rms > 1e-9) {
            std::vector<std::vector<LineSeed>> trials;
            // A weak, broad companion shows up as the largest residual bump.
            const auto& r = single.lm.residual;
            Eigen::Index low = 0;
            r.minCoeff(&low);
            const auto bump = static_cast<std::size_t>(low);
            std::vector<double> excess(r.size());
            for (Eigen::Index i = 0; i < r.size(); ++i) excess[i] = -r[i];
            trials.push_back({{single.lm.params[0], std::abs(single.lm.params[1]),
                               single.lm.params[2]},
                              {xs[bump], half_max_width(xs, excess, bump), -r[low]}});
            for (double offset : {0.25, 0.5, 1.0, 2.0}) {
                const double d = offset * main.fwhm;
                trials.insert(trials.end(), {
                    {{main.center, main.fwhm, 0.7 * main.amplitude},
                     {main.center + d, main.fwhm, 0.3 * main.amplitude}},
                    {{main.center - d, main.fwhm, 0.3 * main.amplitude},
                     {main.center, main.fwhm, 0.7 * main.amplitude}},
                    {{main.center - 0.5 * d, main.fwhm, 0.5 * main.amplitude},
                     {main.center + 0.5 * d, main.fwhm, 0.5 * main.amplitude}},
                });
            }
            std::optional<LineFit> best;
            for (const auto& trial : trials) {
                LineFit fit = fit_lines(xs, ys, trial, base);
                if (plausible_doublet(fit) && (!best || fit.lm.cost < best->lm.cost)) {
                    best = std::move(fit);
                }
            }
            if (best && best->rms < 0.7 * single.rms) chosen = std::move(best);
        }
        if (!chosen) chosen = std::move(single);
    }

    const auto& lm = chosen->lm;
    if (!lm.converged || !lm.params.allFinite()) {
        std::vector<double> last(lm.params.data(), lm.params.data() + lm.params.size());
        throw FitError("doublet fit did not converge", std::move(last), chosen->rms * yscale);
    }

    const Eigen::VectorXd se = standard_errors(lm.jacobian, lm.residual);
    const auto& p = lm.params;
    DoubletFit out;
    out.iterations = lm.iterations;
    out.residual_rms = chosen->rms * yscale;
    if (chosen->lines == 1) {
        out.degenerate = true;
        out.center1 = out.center2 = p[0] + x0;
        out.fwhm1 = out.fwhm2 = std::abs(p[1]);
        out.amplitude1 = out.amplitude2 = 0.5 * p[2] * yscale;
        out.baseline_slope = p[4] * yscale;
        out.baseline_offset = (p[3] - p[4] * x0) * yscale;
        out.standard_errors = {se[0],          se[0],          se[1],          se[1],
                               se[2] * yscale, se[2] * yscale, se[3] * yscale, se[4] * yscale};
        return out;
    }

    int first = 0, second = 1;
    if (p[1] < p[0]) std::swap(first, second);
    out.center1 = p[first] + x0;
    out.center2 = p[second] + x0;
    out.fwhm1 = std::abs(p[2 + first]);
    out.fwhm2 = std::abs(p[2 + second]);
    out.amplitude1 = p[4 + first] * yscale;
    out.amplitude2 = p[4 + second] * yscale;
    out.baseline_slope = p[7] * yscale;
    out.baseline_offset = (p[6] - p[7] * x0) * yscale;
    out.standard_errors = {se[first],           se[second],          se[2 + first],
                           se[2 + second],      se[4 + first] * yscale, se[4 + second] * yscale,
                           se[6] * yscale,      se[7] * yscale};
    return out;
}

ScatterInference infer_scatterer_radius(double splitting_mhz, double broadening_mhz,
                                        double wavelength_m, double refractive_index) {
    if (!(splitting_mhz > 0.0)) throw std::domain_error("splitting must be > 0");
    if (!(broadening_mhz > 0.0)) throw std::domain_error("broadening must be > 0");
    if (!(wavelength_m > 0.0)) throw std::domain_error("wavelength must be > 0");
    const double lam3 = wavelength_m * wavelength_m * wavelength_m;
    const double alpha = 3.0 * lam3 * broadening_mhz / (4.0 * kPi * kPi * splitting_mhz);
    return {alpha, radius_from_polarizability(alpha, refractive_index)};
}

SinusoidFit fit_sinusoid(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (y.size() != n) throw std::invalid_argument("x and y differ in length");
    if (n < 5) throw std::invalid_argument("sinusoid fit needs at least 5 samples");

    const double xmean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    std::vector<double> xc(n);
    for (std::size_t i = 0; i < n; ++i) xc[i] = x[i] - xmean;
    const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
    const double span = *xmax - *xmin;
    if (!(span > 0.0)) throw std::invalid_argument("abscissa has zero span");
    std::vector<double> gaps(n - 1);
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i + 1 < n; ++i) gaps[i] = sorted[i + 1] - sorted[i];
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    const double spacing = gaps[gaps.size() / 2];

    // Coarse periodogram: linear least squares at each trial frequency.
    const double fmin = 1.0 / span;
    const double fmax = 0.5 / spacing;
    const auto grid = std::clamp<std::size_t>(
        static_cast<std::size_t>((fmax - fmin) * span * 10.0) + 1, 2, 20000);
    double best_f = fmin, best_ssr = std::numeric_limits<double>::infinity();
    Eigen::Vector3d best_coef = Eigen::Vector3d::Zero();
    Eigen::MatrixXd design(n, 3);
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));
    for (std::size_t g = 0; g < grid; ++g) {
        const double f = fmin + (fmax - fmin) * static_cast<double>(g) / (grid - 1);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = kTwoPi * f * xc[i];
            design(i, 0) = 1.0;
            design(i, 1) = std::sin(t);
            design(i, 2) = std::cos(t);
        }
        const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(yv);
        const double ssr = (design * coef - yv).squaredNorm();
        if (ssr < best_ssr) {
            best_ssr = ssr;
            best_f = f;
            best_coef = coef;
        }
    }

    SinusoidFit out;
    const double ymax = yv.cwiseAbs().maxCoeff();
    double mean = best_coef[0], s = best_coef[1], c = best_coef[2], f = best_f;
    if (std::hypot(s, c) > 1e-12 * std::max(1.0, ymax)) {
        auto residual = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
            r.resize(static_cast<Eigen::Index>(n));
            if (jac) jac->resize(static_cast<Eigen::Index>(n), 4);
            for (std::size_t i = 0; i < n; ++i) {
                const double t = kTwoPi * p[3] * xc[i];
                const double sn = std::sin(t), cs = std::cos(t);
                r[i] = p[0] + p[1] * sn + p[2] * cs - y[i];
                if (jac) {
                    (*jac)(i, 0) = 1.0;
                    (*jac)(i, 1) = sn;
                    (*jac)(i, 2) = cs;
                    (*jac)(i, 3) = kTwoPi * xc[i] * (p[1] * cs - p[2] * sn);
                }
            }
        };
        Eigen::VectorXd p0(4);
        p0 << mean, s, c, f;
        const auto lm = levenberg_marquardt(residual, p0);
        if (!lm.converged || !lm.params.allFinite()) {
            std::vector<double> last(lm.params.data(), lm.params.data() + 4);
            throw FitError("sinusoid fit did not converge", std::move(last),
                           std::sqrt(lm.residual.squaredNorm() / static_cast<double>(n)));
        }
        mean = lm.params[0];
        s = lm.params[1];
        c = lm.params[2];
        f = std::abs(lm.params[3]);
        if (lm.params[3] < 0.0) s = -s;
        best_ssr = lm.residual.squaredNorm();
    }
    out.mean = mean;
    out.amplitude = std::hypot(s, c);
    out.period = 1.0 / f;
    // A sin(t + phi) = A cos(phi) sin t + A sin(phi) cos t, referred back to raw x.
    out.phase = std::remainder(std::atan2(c, s) - kTwoPi * f * xmean, kTwoPi);
    out.residual_rms = std::sqrt(best_ssr / static_cast<double>(n));
    return out;
}

QuadraticFit fit_quadratic(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (y.size() != n) throw std::invalid_argument("x and y differ in length");
    if (n < 4) throw std::invalid_argument("quadratic fit needs at least 4 points");

    Eigen::MatrixXd design(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = x[i];
        design(i, 2) = x[i] * x[i];
    }
    Eigen::Vector3d colscale;
    for (int j = 0; j < 3; ++j) {
        colscale[j] = design.col(j).norm();
        if (colscale[j] == 0.0) throw std::domain_error("quadratic design is rank-deficient");
        design.col(j) /= colscale[j];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < 3) throw std::domain_error("quadratic design is rank-deficient");
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));
    const Eigen::Vector3d scaled = qr.solve(yv);
    const Eigen::VectorXd residual = design * scaled - yv;
    Eigen::VectorXd se = standard_errors(design, residual);
    if (n == 3) se.setConstant(kNaN);

    QuadraticFit out;
    out.c0 = scaled[0] / colscale[0];
    out.c1 = scaled[1] / colscale[1];
    out.c2 = scaled[2] / colscale[2];
    out.se0 = se[0] / colscale[0];
    out.se1 = se[1] / colscale[1];
    out.se2 = se[2] / colscale[2];
    out.residual_rms = std::sqrt(residual.squaredNorm() / static_cast<double>(n));
    return out;
}

LinearProfileFit fit_profile(std::span<const double> basis, std::span<const double> y) {
    const std::size_t n = basis.size();
    if (y.size() != n) throw std::invalid_argument("basis and y differ in length");
    if (n < 3) throw std::invalid_argument("profile fit needs at least 3 points");
    Eigen::MatrixXd design(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = basis[i];
    }
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < 2) throw std::domain_error("profile design is rank-deficient");
    const Eigen::Vector2d coef = qr.solve(yv);
    return {coef[0], coef[1], std::sqrt((design * coef - yv).squaredNorm() / n)};
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (b.size() != n || n < 2) throw std::invalid_argument("need two equal-length series");
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return kNaN;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace wgm
