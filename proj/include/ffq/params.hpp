#pragma once

#include <stdexcept>
#include <string>

#include "ffq/constants.hpp"

namespace ffq {

// Device constants of the effective flip-flop qubit model. Frequencies are
// stored in Hz and lengths in metres; config files use suffixed keys
// (b0_T, gamma_e_GHz_per_T, ...) and are converted on parse.
struct PhysicalParams {
  double b0_T = 0.4;                 // static magnetic field
  double gamma_e_Hz_per_T = 27.97e9; // electron gyromagnetic ratio
  double gamma_n_Hz_per_T = 17.23e6; // nuclear gyromagnetic ratio
  double a_Hz = 117e6;               // bulk hyperfine coupling
  double d_m = 15e-9;                // donor-interface distance
  double vt_Hz = 11e9;               // tunnel coupling
  double eps_r = 11.7;               // relative permittivity
  double g_scale = 1000.0;           // dipole-coupling calibration factor

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0))
        throw std::invalid_argument(std::string("PhysicalParams: ") + name +
                                    " must be strictly positive");
    };
    positive(b0_T, "b0_T");
    positive(gamma_e_Hz_per_T, "gamma_e_Hz_per_T");
    positive(gamma_n_Hz_per_T, "gamma_n_Hz_per_T");
    positive(a_Hz, "a_Hz");
    positive(d_m, "d_m");
    positive(vt_Hz, "vt_Hz");
    positive(eps_r, "eps_r");
    positive(g_scale, "g_scale");
  }

  // Orbital detuning per unit of field difference, Hz per (V/m).
  double orbital_rate() const {
    return constants::elementary_charge * d_m / constants::planck_h;
  }
};

}  // namespace ffq
