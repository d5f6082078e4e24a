# SPDX-FileCopyrightText: 2024-present digraph-resistance contributors
#
# SPDX-License-Identifier: MIT
__version__ = "0.1.0"
