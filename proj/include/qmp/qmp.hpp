#pragma once

#include "qmp/distance.hpp"
#include "qmp/embed.hpp"
#include "qmp/errors.hpp"
#include "qmp/experiment.hpp"
#include "qmp/hermitian_eigen.hpp"
#include "qmp/mp_law.hpp"
#include "qmp/quaternion.hpp"
#include "qmp/sampling.hpp"
#include "qmp/spectra.hpp"
