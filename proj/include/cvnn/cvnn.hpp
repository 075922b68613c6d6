#pragma once

#include "cvnn/activation.hpp"
#include "cvnn/certificate.hpp"
#include "cvnn/classifier.hpp"
#include "cvnn/config.hpp"
#include "cvnn/core.hpp"
#include "cvnn/deep.hpp"
#include "cvnn/error.hpp"
#include "cvnn/extraction.hpp"
#include "cvnn/lstsq.hpp"
#include "cvnn/network.hpp"
#include "cvnn/network_io.hpp"
#include "cvnn/stencil.hpp"
#include "cvnn/synthesis.hpp"
#include "cvnn/targets.hpp"
#include "cvnn/verify.hpp"
#include "cvnn/version.hpp"
#include "cvnn/wirtinger.hpp"
