#pragma once

// Single-image inverse camera response estimation: consistency-weighted,
// gradually refined linearization of scanned pixel distributions, plus a
// synthetic-scene oracle for end-to-end verification.

#include "radiocal/curve.hpp"
#include "radiocal/curve_io.hpp"
#include "radiocal/errors.hpp"
#include "radiocal/estimator.hpp"
#include "radiocal/eval.hpp"
#include "radiocal/ggcm.hpp"
#include "radiocal/image.hpp"
#include "radiocal/image_io.hpp"
#include "radiocal/line_fit.hpp"
#include "radiocal/nelder_mead.hpp"
#include "radiocal/patches.hpp"
#include "radiocal/report.hpp"
#include "radiocal/synth.hpp"
#include "radiocal/vote.hpp"
