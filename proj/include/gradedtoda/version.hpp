#ifndef GRADEDTODA_VERSION_HPP
#define GRADEDTODA_VERSION_HPP

#define GRADEDTODA_VERSION "0.1.0"

#endif  // GRADEDTODA_VERSION_HPP
