#!/usr/bin/env node
import { adaptLandmarks } from "./adapt.js";
import { runCli } from "./cli.js";

process.exit(runCli("adapt-landmarks", adaptLandmarks));
