"""Test suite for the periodic texture GAN toolkit."""
