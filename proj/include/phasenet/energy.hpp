#pragma once

#include <optional>
#include <vector>

#include "phasenet/eikonal.hpp"
#include "phasenet/grid.hpp"

namespace phasenet {

enum class Mode { kSteiner, kCompliance };

const char* to_string(Mode mode);

/// Parameters of one relaxed problem at a fixed eps.
struct ProblemConfig {
  Mode mode = Mode::kCompliance;
  double lambda = 1.0;   ///< length penalty (ignored in Steiner mode)
  double eps = 0.05;
  double eta = 0.0025;   ///< lower box bound for phi
  double c_eps = 0.0;    ///< Steiner distance-term coefficient
  double q = 2.0;        ///< flux exponent; the optimizer requires 2
  Point source;          ///< compliance: y0. Steiner: equals terminals[0]
  std::vector<Point> terminals;
  double f_const = 1.0;

  /// max(1e-3, eps^2)
  static double default_eta(double eps);
  /// sqrt(eps)
  static double default_c_eps(double eps);

  /// Throws std::invalid_argument describing the first violated invariant.
  void validate(const GridSpec& grid) const;
};

/// Per-term values of the discrete energy. For Steiner energies the flux term
/// is zero and `geodesic_term` holds the terminal distance sum / c_eps.
struct EnergyBreakdown {
  double flux_term = 0.0;
  double mm_penalty = 0.0;
  double mm_gradient = 0.0;
  double geodesic_term = 0.0;
  double total = 0.0;
};

/// Source cell of the geodesic distance for either mode.
CellIndex geodesic_source(const GridSpec& grid, const ProblemConfig& cfg);

/// Terminal cells snapped to the nearest centers, duplicates removed, first
/// terminal first.
std::vector<CellIndex> snap_terminals(const GridSpec& grid,
                                      const ProblemConfig& cfg);

/// lambda / (4 eps) sum h^2 (1 - phi)^2 and lambda eps sum h^2 |D phi|^2.
struct ModicaMortolaTerms {
  double penalty = 0.0;
  double gradient = 0.0;
};
ModicaMortolaTerms modica_mortola_terms(const ScalarField& phi, double lambda,
                                        double eps);

/// Gradient of the two Modica-Mortola sums with respect to the cell values:
/// -(lambda / (2 eps)) h^2 (1 - phi) - 2 lambda eps h^2 Div(grad phi).
ScalarField modica_mortola_gradient(const ScalarField& phi, double lambda,
                                    double eps);

/// Cell weights of the distance term,
/// (h^2 / (2 sqrt(eps))) sqrt((Div V + f)^2 + eps^2).
ScalarField geodesic_weights(const StaggeredField& v, const ProblemConfig& cfg);

/// The compliance energy G^h at (V, phi). `geo` must be the distance field of
/// phi from geodesic_source(cfg). For q != 2 the flux term is
/// (1/q) sum h^2 (|V1|^q + |V2|^q).
EnergyBreakdown compliance_energy(const StaggeredField& v,
                                  const ScalarField& phi,
                                  const ProblemConfig& cfg,
                                  const GeodesicResult& geo);

/// Exact gradient of compliance_energy in the face values of V (plain
/// partial derivatives of the discrete sum). Boundary faces are zero.
/// Requires q = 2.
StaggeredField grad_v(const StaggeredField& v, const ProblemConfig& cfg,
                      const GeodesicResult& geo);

/// Descent information in phi: Modica-Mortola gradient plus a supergradient
/// of the distance term. Callers step along the negative.
ScalarField descent_dir_phi(const StaggeredField& v, const ScalarField& phi,
                            const ProblemConfig& cfg,
                            const GeodesicResult& geo);
ScalarField descent_dir_phi(const StaggeredField& v, const ScalarField& phi,
                            const ProblemConfig& cfg);

/// (1/(4 eps)) sum h^2 (1-phi)^2 + eps sum h^2 |D phi|^2
///   + (1/c_eps) sum_i d_phi(x_i, x_0).
EnergyBreakdown steiner_energy(const ScalarField& phi,
                               const ProblemConfig& cfg,
                               const GeodesicResult& geo);
EnergyBreakdown steiner_energy(const ScalarField& phi,
                               const ProblemConfig& cfg);

ScalarField steiner_descent(const ScalarField& phi, const ProblemConfig& cfg,
                            const GeodesicResult& geo);
ScalarField steiner_descent(const ScalarField& phi, const ProblemConfig& cfg);

/// Total variation diagnostic sum h^2 |Div V + f|.
double flux_total_variation(const StaggeredField& v, double f_const = 1.0);

}  // namespace phasenet
