#include "z2thermo/quench_impl.hpp"

namespace z2thermo {

template QuenchReport run_quench_at<MpReal<80>>(const ModelParams&, const QuenchOptions&);

}  // namespace z2thermo
