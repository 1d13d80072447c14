#ifndef BOSONLAB_MODEL_HPP
#define BOSONLAB_MODEL_HPP

#include "bosonlab/errors.hpp"
#include "bosonlab/grid.hpp"
#include "bosonlab/spectral.hpp"

namespace bosonlab {

enum class Phase { Bec, Normal };

// Which measure a functional/sampler refers to: the determinantal component,
// the shifted (condensate) component, their convolution, or the normal-phase
// determinantal measure with kernel K_z.
enum class MeasureId { Det, Shifted, Bec, NormalDet };

struct ModelParams {
  double beta = 1.0;
  Phase phase = Phase::Bec;
  double rho = 0.0;  // total density, BEC phase
  double z = 0.0;    // fugacity, normal phase
  double rho_c_grid = 0.0;
  double rho_c_continuum = 0.0;

  double rho_eff() const { return rho - rho_c_grid; }
};

inline ModelParams make_bec_params(const Grid& g, double beta, double rho) {
  if (!(beta > 0.0)) throw Error("make_bec_params: beta > 0 required");
  ModelParams p;
  p.beta = beta;
  p.phase = Phase::Bec;
  p.rho = rho;
  p.rho_c_grid = critical_density_grid(g, beta);
  p.rho_c_continuum = critical_density_continuum(beta, g.dim);
  if (!(rho > p.rho_c_grid))
    throw NotCondensed("make_bec_params: rho must exceed the grid critical density");
  return p;
}

inline ModelParams make_normal_params(const Grid& g, double beta, double z) {
  if (!(beta > 0.0)) throw Error("make_normal_params: beta > 0 required");
  if (!(z > 0.0 && z < 1.0))
    throw BadFugacity("make_normal_params: z must lie in (0,1)");
  ModelParams p;
  p.beta = beta;
  p.phase = Phase::Normal;
  p.z = z;
  p.rho_c_grid = critical_density_grid(g, beta);
  p.rho_c_continuum = critical_density_continuum(beta, g.dim);
  if (!(normal_density_grid(g, beta, z) < p.rho_c_grid))
    throw BadFugacity(
        "make_normal_params: density rho(z) reaches the grid critical "
        "density; reduce z or enlarge the box");
  return p;
}

}  // namespace bosonlab

#endif
