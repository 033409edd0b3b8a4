// wqed.hpp — umbrella include

#pragma once

#include "wqed/basis.hpp"
#include "wqed/config.hpp"
#include "wqed/errors.hpp"
#include "wqed/io.hpp"
#include "wqed/model.hpp"
#include "wqed/observables.hpp"
#include "wqed/params.hpp"
#include "wqed/quadrature.hpp"
#include "wqed/rational.hpp"
#include "wqed/runner.hpp"
#include "wqed/scattering.hpp"
#include "wqed/spectral.hpp"
#include "wqed/sweeps.hpp"
#include "wqed/time_domain.hpp"
#include "wqed/version.hpp"
