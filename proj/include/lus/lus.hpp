#pragma once

#include "chi2.hpp"
#include "cross_validation.hpp"
#include "dataset.hpp"
#include "dtcwt.hpp"
#include "dwt.hpp"
#include "error.hpp"
#include "features.hpp"
#include "image.hpp"
#include "image_io.hpp"
#include "lda.hpp"
#include "preprocess.hpp"
#include "special_functions.hpp"
#include "synth.hpp"
#include "texture.hpp"
