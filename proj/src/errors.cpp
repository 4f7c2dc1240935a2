#include "rdr/errors.hpp"

#include "rdr/io.hpp"

namespace rdr {

PoleAtFrequency::PoleAtFrequency(double omega)
    : NumericalError("response has a pole at omega = " + format_double(omega)), omega_(omega) {}

}  // namespace rdr
