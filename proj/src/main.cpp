#include "pkin/driver.hpp"

int main(int argc, char** argv) { return pkin::cli_main(argc, argv); }
