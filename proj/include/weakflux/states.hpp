#pragma once

#include <optional>
#include <string>
#include <vector>

#include "weakflux/numerics.hpp"

namespace weakflux {

/// Gaussian minimum-uncertainty wavepacket: width parameter gamma (inverse
/// length squared), center and mean momentum.
struct CoherentState1D {
    double gamma = 1.0;
    double center = 0.0;
    double momentum = 0.0;
    double hbar = 1.0;
};

/// <x|state> for the normalized Gaussian packet.
Complex coherent_amplitude(const CoherentState1D& s, double x);

/// Two-component spinor on the sigma_z basis.
struct SpinorAmplitudes {
    Complex up{1.0, 0.0};
    Complex down{0.0, 0.0};

    double norm_sq() const { return std::norm(up) + std::norm(down); }
};

/// Symmetric superposition (1, e^{i chi})/sqrt(2).
SpinorAmplitudes spinor_from_phase(double chi);

/// Laboratory-frame Stern-Gerlach parameters.
struct PhysicalSGParams {
    double mass = 1.0;                  // M
    double field_gradient = 1.0;        // b
    double interaction_strength = 1.0;  // mu_c
    double field_length = 1.0;          // l
    double packet_width = 1.0;          // d
    double wavenumber = 1.0;            // k_y
};

/// Dimensionless parameters after rescaling lengths by the packet width and
/// times by mass*width^2/hbar.
struct ReducedUnits {
    double alpha = 0.0;       // reduced field strength
    double k_y = 0.0;         // reduced wavenumber
    double tau = 0.0;         // classical traversal time of the field region
    double time_scale = 0.0;  // multiply a physical time by this to reduce it
};

ReducedUnits reduce_units(const PhysicalSGParams& p, double hbar = 1.0);

/// Reduced-unit Stern-Gerlach run parameters. Spinors are stored explicitly;
/// the phase fields record the symmetric parameterization they came from
/// (when they did).
struct SGConfig {
    double alpha = 0.5;
    double k_y = 10.0;
    double y_s = 10.0;
    double y_i = -10.0;
    double z0 = 0.5;
    double chi_i = 0.0;
    double chi_f = 0.0;
    SpinorAmplitudes pre;
    SpinorAmplitudes post;
};

struct SGParams {
    double alpha = 0.5;
    double k_y = 10.0;
    double y_s = 10.0;
    double y_i = -10.0;
    std::optional<double> z0;  // default: alpha * y_s / k_y
    double chi_i = 0.0;
    double chi_f = 0.0;
    // When provided these win over the phases.
    std::optional<SpinorAmplitudes> pre_spinor;
    std::optional<SpinorAmplitudes> post_spinor;
};

/// Builds a validated SGConfig. Explicit spinors override the phase
/// parameterization; that override is reported through `warnings`.
SGConfig make_sg_config(const SGParams& p, std::vector<std::string>* warnings = nullptr);

}  // namespace weakflux
