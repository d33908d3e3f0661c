# Experiment driver: configuration, h-sweep orchestration and report emission
