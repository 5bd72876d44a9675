# gti-asym test package
