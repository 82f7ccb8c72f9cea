namespace mtl {}
