// SPDX-License-Identifier: Apache-2.0

#include "cidcassi/cli.hpp"

int main(int argc, char** argv) { return cidcassi::cli_main(argc, argv); }
