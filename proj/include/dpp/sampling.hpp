#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dpp/static_kernels.hpp"

namespace dpp {

enum class EnsembleFamily { gue_scaled, gue_shifted, laguerre };

// Which Laguerre density to draw from:
//   kernel:  prod |x_i - x_j|^2 prod x^nu e^{-x/(2N)}, the DPP of laguerre_n(N, nu)
//            at its default scale 2N and the reversible measure of sqbessel_ou
//   half_shift: prod |x_i - x_j|^2 prod x^{nu+1/2} e^{-x/2}
enum class LaguerreConvention { kernel, half_shift };

struct EnsembleSpec {
    EnsembleFamily family = EnsembleFamily::gue_scaled;
    int n = 1;
    double nu = 0.0;
    LaguerreConvention convention = LaguerreConvention::kernel;

    static EnsembleSpec gue_scaled(int n) { return {EnsembleFamily::gue_scaled, n, 0.0, LaguerreConvention::kernel}; }
    static EnsembleSpec gue_shifted(int n) { return {EnsembleFamily::gue_shifted, n, 0.0, LaguerreConvention::kernel}; }
    static EnsembleSpec laguerre(int n, double nu, LaguerreConvention c = LaguerreConvention::kernel) {
        return {EnsembleFamily::laguerre, n, nu, c};
    }
    static EnsembleSpec parse(const std::string& family, int n, double nu, const std::string& convention = "kernel");

    void validate() const;
    std::string name() const;
    bool half_line() const { return family == EnsembleFamily::laguerre; }
    // The finite-N kernel whose DPP this ensemble is (gue_shifted has none).
    StaticKernel kernel() const;
};

struct EnsembleSample {
    std::vector<std::vector<double>> configurations;  // each sorted increasing
    EnsembleSpec spec;
    std::uint64_t seed = 0;
};

// Draw i is a pure function of (seed, i).
std::vector<double> sample_one(const EnsembleSpec& spec, std::uint64_t seed, std::uint64_t index);
EnsembleSample sample(const EnsembleSpec& spec, std::size_t count, std::uint64_t seed);

// log of the product formula without the normalizing constant; -infinity on
// coincident points. Points outside the state space are a DomainError.
double log_density_unnormalized(const EnsembleSpec& spec, std::span<const double> x);

struct MetropolisResult {
    std::vector<double> state;  // sorted
    long proposals = 0;
    long accepted = 0;
};

// Random-walk Metropolis on the unnormalized density, one coordinate at a time.
MetropolisResult metropolis(const EnsembleSpec& spec, std::span<const double> initial, long sweeps, double step,
                            std::uint64_t seed, std::uint64_t stream);

}  // namespace dpp
