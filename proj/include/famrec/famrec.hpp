#ifndef FAMREC_FAMREC_HPP_
#define FAMREC_FAMREC_HPP_

#include "famrec/aggregate.hpp"
#include "famrec/corpus.hpp"
#include "famrec/error.hpp"
#include "famrec/eval.hpp"
#include "famrec/matrix_io.hpp"
#include "famrec/recommend.hpp"
#include "famrec/simcore.hpp"
#include "famrec/synth.hpp"

#endif // FAMREC_FAMREC_HPP_
