#ifndef EENET_FORMAT_HPP
#define EENET_FORMAT_HPP

#include <string>

namespace eenet {

// %.17g: enough significant digits to round-trip any double exactly, and a
// fixed width rule so identical values always print identically.
std::string format_double(double value);

} // namespace eenet

#endif
