#include "wgm/coupled_mode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wgm/physics.hpp"

namespace wgm {

ScattererPlacement ScattererPlacement::at(const WgmMode& mode, double alpha, const Position& pos) {
    const double f = mode_amplitude(mode, pos);
    return {alpha, f * f, pos.phi};
}

ScattererCoupling scatterer_coupling(const WgmMode& mode, const ScattererPlacement& placement) {
    const auto rates = coupling_rates(placement.alpha, placement.f_sq, mode.optical_context(),
                                      mode.mode_volume);
    return {rates.two_g, rates.gamma, placement.phi};
}

Generator build_generator_from_couplings(const WgmMode& mode,
                                         std::span<const ScattererCoupling> couplings,
                                         double kappa0) {
    Generator gen;
    gen.gamma0 = mode.gamma0();
    gen.kappa0 = kappa0;
    gen.azimuthal_order = mode.azimuthal_order;
    cplx diag{-gen.gamma0, 0.0};
    cplx upper{}, lower{};
    const double m = mode.azimuthal_order;
    for (const auto& c : couplings) {
        const cplx v = c.v();
        const cplx phase = std::polar(1.0, 2.0 * m * c.phi);
        diag += v;
        upper += v * phase;
        lower += v * std::conj(phase);
    }
    gen.m11 = diag;
    gen.m22 = diag;
    gen.m12 = upper;
    gen.m21 = lower;
    return gen;
}

Generator build_generator(const WgmMode& mode, std::span<const ScattererPlacement> scatterers,
                          double kappa0) {
    std::vector<ScattererCoupling> couplings;
    couplings.reserve(scatterers.size());
    for (const auto& s : scatterers) couplings.push_back(scatterer_coupling(mode, s));
    return build_generator_from_couplings(mode, couplings, kappa0);
}

namespace {

Eigenmode make_eigenmode(const Generator& gen, cplx lambda) {
    AmplitudePair vec;
    if (gen.m12 != cplx{}) {
        vec = {gen.m12, lambda - gen.m11};
    } else if (gen.m21 != cplx{}) {
        vec = {lambda - gen.m22, gen.m21};
    } else {
        // Traveling waves; pick by which diagonal entry lambda came from.
        const bool first = std::abs(lambda - gen.m11) <= std::abs(lambda - gen.m22);
        vec = first ? AmplitudePair{1.0, 0.0} : AmplitudePair{0.0, 1.0};
    }
    const double norm = std::sqrt(std::norm(vec[0]) + std::norm(vec[1]));
    if (norm == 0.0) throw std::logic_error("generator is defective");
    vec[0] /= norm;
    vec[1] /= norm;

    double psi = 0.0;
    if (vec[0] != cplx{} && vec[1] != cplx{}) psi = 0.5 * std::arg(vec[1] / vec[0]);
    return {lambda, lambda.imag(), -lambda.real(), vec, psi};
}

}  // namespace

std::array<Eigenmode, 2> eigenmodes(const Generator& gen) {
    const cplx mean = 0.5 * (gen.m11 + gen.m22);
    const cplx half_diff = 0.5 * (gen.m11 - gen.m22);
    const cplx root = std::sqrt(half_diff * half_diff + gen.m12 * gen.m21);
    if (root == cplx{} && (gen.m12 != cplx{} || gen.m21 != cplx{})) {
        throw std::logic_error("generator is defective (exceptional point)");
    }
    std::array<Eigenmode, 2> modes{make_eigenmode(gen, mean + root),
                                   make_eigenmode(gen, mean - root)};
    if (root == cplx{}) {
        // Degenerate without coupling: make the two vectors the standard basis.
        modes[0].vector = {1.0, 0.0};
        modes[1].vector = {0.0, 1.0};
        modes[0].standing_wave_phase = modes[1].standing_wave_phase = 0.0;
    }
    std::sort(modes.begin(), modes.end(), [](const Eigenmode& a, const Eigenmode& b) {
        if (a.frequency_shift != b.frequency_shift) return a.frequency_shift < b.frequency_shift;
        return a.half_linewidth < b.half_linewidth;
    });
    return modes;
}

double observed_splitting(const Generator& gen) {
    const cplx half_diff = 0.5 * (gen.m11 - gen.m22);
    return std::abs((2.0 * std::sqrt(half_diff * half_diff + gen.m12 * gen.m21)).imag());
}

double local_intensity(const AmplitudePair& amplitudes, int azimuthal_order, double phi) {
    const cplx phase = std::polar(1.0, azimuthal_order * phi);
    return std::norm(amplitudes[0] * std::conj(phase) + amplitudes[1] * phase);
}

AmplitudePair steady_state(const Generator& gen, double detuning) {
    const cplx idelta{0.0, detuning};
    const cplx a11 = idelta - gen.m11;
    const cplx a12 = -gen.m12;
    const cplx a21 = -gen.m21;
    const cplx a22 = idelta - gen.m22;
    const cplx det = a11 * a22 - a12 * a21;
    if (det == cplx{} || !std::isfinite(std::abs(det))) {
        throw std::domain_error("steady state is singular at this detuning");
    }
    return {a22 * gen.kappa0 / det, -a21 * gen.kappa0 / det};
}

Spectrum spectrum(const Generator& gen, std::span<const double> detuning_grid,
                  const std::optional<TipProbe>& tip, const SpectrumOptions& options) {
    if (detuning_grid.empty()) throw std::invalid_argument("detuning grid is empty");
    if (!(options.outcoupling_fraction > 0.0 && options.outcoupling_fraction <= 1.0)) {
        throw std::domain_error("out-coupling fraction must lie in (0, 1]");
    }
    const auto n = detuning_grid.size();
    Spectrum out;
    out.detuning.assign(detuning_grid.begin(), detuning_grid.end());
    out.pd1.resize(n);
    out.pd2.resize(n);
    out.pd3.resize(n);
    const double dip_scale = options.outcoupling_fraction * gen.gamma0 * gen.gamma0 /
                             (gen.kappa0 * gen.kappa0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto e = steady_state(gen, detuning_grid[i]);
        out.pd2[i] = std::norm(e[0]) + std::norm(e[1]);
        out.pd1[i] = 1.0 - dip_scale * std::norm(e[0]);
        out.pd3[i] = tip ? tip->gamma * local_intensity(e, gen.azimuthal_order, tip->phi) : 0.0;
    }
    return out;
}

Trajectory time_evolution(const Generator& gen, double detuning, double kappa,
                          const AmplitudePair& initial, double t_final, double step,
                          std::size_t record_every) {
    if (!(step > 0.0)) throw std::domain_error("time step must be > 0");
    if (!(t_final >= 0.0)) throw std::domain_error("final time must be >= 0");
    if (record_every == 0) record_every = 1;

    const cplx shift{0.0, -detuning};
    Generator shifted = gen;
    shifted.m11 += shift;
    shifted.m22 += shift;
    const auto modes = eigenmodes(shifted);
    const double spectral_radius =
        std::max(std::abs(modes[0].eigenvalue), std::abs(modes[1].eigenvalue));
    if (spectral_radius > 0.0 && !(step < 0.1 / spectral_radius)) {
        throw std::domain_error("time step too large for stable RK4 integration");
    }

    const cplx a11 = shifted.m11, a12 = shifted.m12, a21 = shifted.m21, a22 = shifted.m22;
    auto rhs = [&](const AmplitudePair& e) -> AmplitudePair {
        return {a11 * e[0] + a12 * e[1] + kappa, a21 * e[0] + a22 * e[1]};
    };
    auto axpy = [](const AmplitudePair& e, double h, const AmplitudePair& k) -> AmplitudePair {
        return {e[0] + h * k[0], e[1] + h * k[1]};
    };

    const auto steps = static_cast<std::size_t>(std::ceil(t_final / step - 1e-12));
    Trajectory traj;
    traj.times.reserve(steps / record_every + 2);
    traj.amplitudes.reserve(steps / record_every + 2);
    traj.times.push_back(0.0);
    traj.amplitudes.push_back(initial);

    AmplitudePair e = initial;
    double t = 0.0;
    for (std::size_t i = 1; i <= steps; ++i) {
        const double h = std::min(step, t_final - t);
        const auto k1 = rhs(e);
        const auto k2 = rhs(axpy(e, 0.5 * h, k1));
        const auto k3 = rhs(axpy(e, 0.5 * h, k2));
        const auto k4 = rhs(axpy(e, h, k3));
        for (int c = 0; c < 2; ++c) e[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        t = (i == steps) ? t_final : t + h;
        if (i % record_every == 0 || i == steps) {
            traj.times.push_back(t);
            traj.amplitudes.push_back(e);
        }
    }
    return traj;
}

}  // namespace wgm
