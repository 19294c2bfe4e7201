#pragma once

#include "airwrite/baseline.hpp"
#include "airwrite/errors.hpp"
#include "airwrite/features_tf.hpp"
#include "airwrite/features_time.hpp"
#include "airwrite/fft.hpp"
#include "airwrite/folds.hpp"
#include "airwrite/matrix.hpp"
#include "airwrite/metrics.hpp"
#include "airwrite/pipeline.hpp"
#include "airwrite/resample.hpp"
#include "airwrite/stats.hpp"
#include "airwrite/tensor_io.hpp"
#include "airwrite/trial_store.hpp"
