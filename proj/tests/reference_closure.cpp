// Reference implementations shared by the test and acceptance binaries.
#include "reference_closure.hpp"
