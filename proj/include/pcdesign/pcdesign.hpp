#pragma once

// Umbrella header.

#include "pcdesign/design_space.hpp"
#include "pcdesign/effects_coding.hpp"
#include "pcdesign/errors.hpp"
#include "pcdesign/info_matrix.hpp"
#include "pcdesign/optimizer.hpp"
#include "pcdesign/oracle.hpp"
#include "pcdesign/realize.hpp"
#include "pcdesign/report_io.hpp"
#include "pcdesign/variance.hpp"
#include "pcdesign/version.hpp"
