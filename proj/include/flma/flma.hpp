#pragma once

#include "flma/arff.hpp"
#include "flma/correction.hpp"
#include "flma/csv.hpp"
#include "flma/dataset.hpp"
#include "flma/errors.hpp"
#include "flma/fp_tree.hpp"
#include "flma/label_set.hpp"
#include "flma/matrix.hpp"
#include "flma/metrics.hpp"
#include "flma/mlknn.hpp"
#include "flma/pipeline.hpp"
#include "flma/rules.hpp"
