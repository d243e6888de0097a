#!/usr/bin/env python3
import sys

from xxchain import cliMain

if __name__ == "__main__":
    cliMain(sys.argv)
