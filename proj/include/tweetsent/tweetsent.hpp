#pragma once

// Batch sentiment classification for short informal texts: language-aware
// preprocessing with negation marking, n-gram/syntactic/lexicon/cluster/
// embedding features, a linear SVM trained by dual coordinate descent, and
// the standard macro-recall / F1-PN / accuracy metrics.

#include "tweetsent/eval.hpp"
#include "tweetsent/features.hpp"
#include "tweetsent/model.hpp"
#include "tweetsent/pipeline.hpp"
#include "tweetsent/resources.hpp"
#include "tweetsent/svm.hpp"
#include "tweetsent/text.hpp"
