# Test package for yamabe-products.
