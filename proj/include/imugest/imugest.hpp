#pragma once

// Umbrella header: the whole gesture-classification toolkit.

#include "imugest/csv.hpp"
#include "imugest/dnn.hpp"
#include "imugest/eval.hpp"
#include "imugest/features.hpp"
#include "imugest/jacobi.hpp"
#include "imugest/knn.hpp"
#include "imugest/matrix.hpp"
#include "imugest/pca.hpp"
#include "imugest/pipeline.hpp"
#include "imugest/reproduce.hpp"
#include "imugest/rng.hpp"
#include "imugest/serialize.hpp"
#include "imugest/signal.hpp"
#include "imugest/svm.hpp"
#include "imugest/synth.hpp"
#include "imugest/textio.hpp"

