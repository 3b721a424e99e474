// SPDX-License-Identifier: Apache-2.0

#include "emunoc/cli/commands.hpp"

int main(int argc, char** argv) { return emunoc::cli::main_entry(argc, argv); }
