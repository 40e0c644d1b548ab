// Copyright 2026 The lau Authors
// SPDX-License-Identifier: Apache-2.0

#include "lau/cli.hpp"

int main(int argc, char** argv) { return lau::run_cli(argc, argv); }
