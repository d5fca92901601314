#ifndef OPTPUMP_OPTPUMP_HPP
#define OPTPUMP_OPTPUMP_HPP

#include "optpump/blockstruct.hpp"
#include "optpump/closedform.hpp"
#include "optpump/dynamics.hpp"
#include "optpump/error.hpp"
#include "optpump/gapopt.hpp"
#include "optpump/matching.hpp"
#include "optpump/model.hpp"
#include "optpump/operators.hpp"
#include "optpump/spectral.hpp"
#include "optpump/superop.hpp"
#include "optpump/types.hpp"

#endif  // OPTPUMP_OPTPUMP_HPP
