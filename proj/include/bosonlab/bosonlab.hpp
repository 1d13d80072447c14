#ifndef BOSONLAB_BOSONLAB_HPP
#define BOSONLAB_BOSONLAB_HPP

#include "bosonlab/asymptotics.hpp"
#include "bosonlab/config.hpp"
#include "bosonlab/errors.hpp"
#include "bosonlab/fft.hpp"
#include "bosonlab/functionals.hpp"
#include "bosonlab/grid.hpp"
#include "bosonlab/model.hpp"
#include "bosonlab/operator_matrix.hpp"
#include "bosonlab/report_io.hpp"
#include "bosonlab/sampler.hpp"
#include "bosonlab/spectral.hpp"
#include "bosonlab/test_function.hpp"
#include "bosonlab/zeta.hpp"

#define BOSONLAB_VERSION "1.0.0"

#endif
