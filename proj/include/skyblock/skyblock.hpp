#ifndef SKYBLOCK_SKYBLOCK_HPP
#define SKYBLOCK_SKYBLOCK_HPP

// Everything except the HTTP label service, which pulls in httplib.
#include "skyblock/blocking.hpp"
#include "skyblock/datamodel.hpp"
#include "skyblock/error.hpp"
#include "skyblock/harness.hpp"
#include "skyblock/learner.hpp"
#include "skyblock/metrics.hpp"
#include "skyblock/oracle.hpp"
#include "skyblock/phonetic.hpp"
#include "skyblock/report.hpp"
#include "skyblock/sampling.hpp"
#include "skyblock/scheme.hpp"
#include "skyblock/training.hpp"

#endif
