// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include <iostream>

#include "cli/app.hpp"

int main(int argc, char** argv) { return cdlab::cli::run(argc, argv, std::cout, std::cerr); }
